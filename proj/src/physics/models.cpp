#include "marlin/physics/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace marlin {

namespace {
constexpr double kEarthRadiusKm = 6371.0;
constexpr double kMbPerGb = 1000.0;  // decimal: KV sizes are quoted in MB
}  // namespace

double haversine_km(const LatLon& a, const LatLon& b) {
    const double to_rad = std::numbers::pi / 180.0;
    const double lat1 = a.lat * to_rad;
    const double lat2 = b.lat * to_rad;
    const double dlat = (b.lat - a.lat) * to_rad;
    const double dlon = (b.lon - a.lon) * to_rad;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
}

double node_memory_usage(const std::vector<int>& resident_models,
                         std::span<const ServedSlice> slices,
                         const std::vector<LLMModelProfile>& models) {
    double gb = 0.0;
    for (int m : resident_models) gb += models.at(m).mem_footprint_gb;
    for (const auto& sl : slices) {
        const auto& prof = models.at(sl.model);
        gb += sl.count * sl.tokens_per_request() * prof.kv_per_token_mb / kMbPerGb;
    }
    return gb;
}

double weight_load_latency(const LLMModelProfile& model, const NodeType& node,
                           bool resident) {
    if (resident) return 0.0;
    return model.mem_footprint_gb / node.bandwidth_gbps;
}

double network_latency_ms(const std::string& origin_region, const Datacenter& dc,
                          const NetworkParams& net) {
    auto coords = net.region_coords.find(origin_region);
    if (coords == net.region_coords.end())
        throw std::invalid_argument("no coordinates for region " + origin_region);
    auto hops = dc.hop_counts.find(origin_region);
    if (hops == dc.hop_counts.end())
        throw std::invalid_argument("datacenter " + dc.id +
                                    ": no hop count for region " + origin_region);
    const double dist_km = haversine_km(coords->second, dc.location);
    return dist_km * net.lambda_media_ms_per_km + hops->second * net.sigma_hop_ms;
}

TtftResult epoch_ttft(const EpochAllocation& alloc, const Scenario& s) {
    TtftResult out;
    for (const auto& dc_alloc : alloc.dcs) {
        const auto& dc = s.datacenters.at(dc_alloc.datacenter);
        for (const auto& node : dc_alloc.active) {
            const auto& nt = s.node_types.at(node.node_type);
            for (const auto& sl : node.slices) {
                if (sl.count == 0) continue;
                const auto& model = s.models.at(sl.model);
                const double load_s =
                    weight_load_latency(model, nt, !sl.cold_load);
                const double net_s =
                    network_latency_ms(s.regions.at(sl.origin_region), dc,
                                       s.network) /
                    1000.0;
                const double exec_s =
                    model.exec_ms_per_token.at(nt.gpu_kind) / 1000.0;
                const double per_request =
                    sl.queue_delay_s + load_s + 2.0 * net_s + exec_s;
                out.total_s += sl.count * per_request;
                out.request_count += sl.count;
            }
        }
    }
    if (out.request_count > 0) out.mean_s = out.total_s / out.request_count;
    return out;
}

EnergyBreakdown datacenter_energy(const DcAllocation& alloc, const Datacenter& dc,
                                  const Scenario& s) {
    const double t_e = s.epoch_hours;
    EnergyBreakdown e;
    for (const auto& node : alloc.active) {
        const auto& nt = s.node_types.at(node.node_type);
        e.e_it += node.pstate_fraction * nt.tdp_kw * t_e;
    }
    for (const auto& idle : alloc.warm_idle) {
        const auto& nt = s.node_types.at(idle.node_type);
        e.e_it += idle.count * nt.idle_fraction() * nt.tdp_kw * t_e;
    }
    // Off nodes draw nothing.
    const double e_crac = e.e_it / dc.cop;
    e.e_cool = s.constants.cooling_multiplier * e_crac;
    e.e_infra = s.constants.infra_fraction * e.e_it;
    e.e_tot = e.e_it + e.e_cool + e.e_infra;
    return e;
}

double energy_cost(std::span<const EnergyBreakdown> per_dc,
                   const std::vector<Datacenter>& dcs, int epoch) {
    double usd = 0.0;
    for (std::size_t d = 0; d < per_dc.size(); ++d)
        usd += per_dc[d].e_tot * dcs.at(d).tou_series.at(epoch);
    return usd;
}

WaterBreakdown water_usage(const EnergyBreakdown& energy, const Datacenter& dc,
                           const physics::PhysicalConstants& c) {
    WaterBreakdown w;
    const double heat_mj = energy.e_it * physics::kMjPerKwh;
    w.g_e = heat_mj / c.j_water_mj_per_l;
    w.g_blow = w.g_e / (1.0 - dc.phi);
    w.g_grid = energy.e_tot * dc.gi_l_per_kwh;
    w.g_tot = w.g_e + w.g_blow + w.g_grid;
    return w;
}

CarbonBreakdown carbon_emissions(const EnergyBreakdown& energy,
                                 const WaterBreakdown& water,
                                 const Datacenter& dc, int epoch,
                                 const physics::PhysicalConstants& c) {
    CarbonBreakdown z;
    const double ci = dc.ci_series.at(epoch);
    z.z_grid = ci * energy.e_tot;
    const double z_pot = (water.g_blow + water.g_e) * c.ei_pot_kwh_per_l;
    const double z_waste = water.g_grid * c.ei_waste_kwh_per_l;
    z.z_g = (z_pot + z_waste) * ci;
    z.z_tot = z.z_grid + z.z_g;
    return z;
}

}  // namespace marlin
