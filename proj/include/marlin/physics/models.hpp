#pragma once

#include <span>
#include <string>
#include <vector>

#include "marlin/core/scenario.hpp"
#include "marlin/physics/allocation.hpp"
#include "marlin/physics/constants.hpp"

namespace marlin {

// Great-circle distance between two coordinates, kilometers.
double haversine_km(const LatLon& a, const LatLon& b);

// Total memory used on a node: resident model footprints plus KV cache for
// every request in flight (input + output tokens). GB, decimal units.
double node_memory_usage(const std::vector<int>& resident_models,
                         std::span<const ServedSlice> slices,
                         const std::vector<LLMModelProfile>& models);

// Time to pull model weights into node memory: footprint / bandwidth.
// Zero when the model is already resident.
double weight_load_latency(const LLMModelProfile& model, const NodeType& node,
                           bool resident);

// One-way latency from an origin region to a datacenter: propagation over the
// great-circle distance plus a per-hop routing delay. Milliseconds.
// Throws std::invalid_argument when the hop count or coordinates are missing.
double network_latency_ms(const std::string& origin_region, const Datacenter& dc,
                          const NetworkParams& net);

struct TtftResult {
    double total_s = 0.0;  // summed TTFT over all served requests
    double mean_s = 0.0;   // per-request average; 0 when nothing served
    int request_count = 0;
};

// Per-request TTFT = carried queue delay + weight load + 2x network latency
// + per-token execution time of the first token. Aggregated over an epoch.
TtftResult epoch_ttft(const EpochAllocation& alloc, const Scenario& s);

struct EnergyBreakdown {
    double e_it = 0.0;
    double e_cool = 0.0;
    double e_infra = 0.0;
    double e_tot = 0.0;

    EnergyBreakdown& operator+=(const EnergyBreakdown& o) {
        e_it += o.e_it;
        e_cool += o.e_cool;
        e_infra += o.e_infra;
        e_tot += o.e_tot;
        return *this;
    }
};

// Epoch energy for one datacenter, kWh. IT energy integrates each powered
// node's p-state fraction of TDP over the epoch; cooling is a fixed multiple
// of the CRAC draw (E_IT / COP); infrastructure is a fixed fraction of IT.
EnergyBreakdown datacenter_energy(const DcAllocation& alloc, const Datacenter& dc,
                                  const Scenario& s);

// Electricity cost over all datacenters at this epoch's time-of-use rates, USD.
double energy_cost(std::span<const EnergyBreakdown> per_dc,
                   const std::vector<Datacenter>& dcs, int epoch);

struct WaterBreakdown {
    double g_e = 0.0;     // evaporated in cooling towers
    double g_blow = 0.0;  // blow-down replacement
    double g_grid = 0.0;  // embedded in grid generation
    double g_tot = 0.0;

    WaterBreakdown& operator+=(const WaterBreakdown& o) {
        g_e += o.g_e;
        g_blow += o.g_blow;
        g_grid += o.g_grid;
        g_tot += o.g_tot;
        return *this;
    }
};

// Water drawn by one datacenter for one epoch, liters. Cooling heat equals
// the IT energy (in MJ); evaporation divides by the latent heat of water,
// blow-down scales it by 1/(1-phi), grid water scales total energy by the
// generation intensity.
WaterBreakdown water_usage(const EnergyBreakdown& energy, const Datacenter& dc,
                           const physics::PhysicalConstants& c);

struct CarbonBreakdown {
    double z_grid = 0.0;  // scope-2 grid emissions
    double z_g = 0.0;     // water treatment/supply emissions
    double z_tot = 0.0;

    CarbonBreakdown& operator+=(const CarbonBreakdown& o) {
        z_grid += o.z_grid;
        z_g += o.z_g;
        z_tot += o.z_tot;
        return *this;
    }
};

// Carbon for one datacenter at one epoch, kg CO2. Grid term scales total
// energy by the epoch's carbon intensity; the water term prices the energy
// embedded in potable supply and wastewater treatment at the same intensity.
CarbonBreakdown carbon_emissions(const EnergyBreakdown& energy,
                                 const WaterBreakdown& water,
                                 const Datacenter& dc, int epoch,
                                 const physics::PhysicalConstants& c);

}  // namespace marlin
