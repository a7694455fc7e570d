#pragma once

namespace marlin::physics {

inline constexpr double kMjPerKwh = 3.6;

// Cooling/water/carbon constants. cooling_multiplier and infra_fraction are
// fixed model multipliers; the rest are literature-scale defaults, all
// overridable from the scenario file.
struct PhysicalConstants {
    double j_water_mj_per_l = 2.257;    // latent heat of vaporization
    double ei_pot_kwh_per_l = 0.0004;   // potable-water energy intensity
    double ei_waste_kwh_per_l = 0.0008; // wastewater treatment energy intensity
    double cooling_multiplier = 3.0;    // E_cool = 3 x E_CRAC
    double infra_fraction = 0.13;       // E_infra = 0.13 x E_IT

    bool valid() const {
        return j_water_mj_per_l > 0 && ei_pot_kwh_per_l > 0 && ei_waste_kwh_per_l > 0 &&
               cooling_multiplier > 0 && infra_fraction > 0;
    }
};

}  // namespace marlin::physics
