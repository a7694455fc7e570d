#include "marlin/bench/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace marlin {

namespace {

std::vector<double> diurnal_series(int epochs, double epoch_hours, double base,
                                   double swing, double phase_offset) {
    std::vector<double> out(static_cast<std::size_t>(epochs));
    const double epochs_per_day = std::max(1.0, 24.0 / epoch_hours);
    for (int e = 0; e < epochs; ++e) {
        const double phase =
            6.283185307179586 *
            (static_cast<double>(e) / epochs_per_day + phase_offset);
        out[e] = std::max(0.01, base * (1.0 + swing * std::sin(phase)));
    }
    return out;
}

std::vector<double> flat_series(int epochs, double value) {
    return std::vector<double>(static_cast<std::size_t>(epochs), value);
}

struct DcSpec {
    const char* id;
    int region;  // index into kRegions
    LatLon loc;
    double ci_base;
    double gi;
    double tou_base;
    double cop;
    double phi;
    int a100_nodes;
    int h100_nodes;
};

constexpr const char* kRegions[] = {"us-east", "us-west", "eu-west", "ap-south"};
constexpr LatLon kRegionCoords[] = {
    {37.54, -77.44},  // us-east (Richmond)
    {45.84, -119.70}, // us-west (Boardman)
    {53.34, -6.26},   // eu-west (Dublin)
    {19.08, 72.88},   // ap-south (Mumbai)
};

// Pool ordering matters: slices are taken from the front. Within the first
// four, each DC uniquely wins one objective: dc0 holds the fast H100 nodes
// (best TTFT), dc1 has the cleanest grid (CI), dc2 the driest water profile
// (GI + COP), dc3 the cheapest energy (TOU). From index 4 on, grids get
// cleaner and drier.
constexpr DcSpec kPool[12] = {
    {"dc00-ashburn", 0, {39.04, -77.49}, 0.45, 1.6, 0.13, 4.0, 0.30, 4, 2},
    {"dc01-dalles", 1, {45.60, -121.18}, 0.10, 1.9, 0.14, 5.0, 0.25, 6, 0},
    {"dc02-dublin", 2, {53.33, -6.25}, 0.35, 0.9, 0.24, 5.5, 0.28, 5, 0},
    {"dc03-mumbai", 3, {19.11, 72.85}, 0.75, 1.5, 0.07, 3.2, 0.35, 6, 0},
    {"dc04-carolina", 0, {35.22, -80.84}, 0.38, 0.8, 0.11, 4.5, 0.30, 4, 2},
    {"dc05-columbia", 1, {47.20, -119.85}, 0.05, 0.25, 0.10, 6.0, 0.25, 0, 4},
    {"dc06-stockholm", 2, {59.33, 18.06}, 0.04, 0.20, 0.15, 7.0, 0.22, 5, 0},
    {"dc07-hyderabad", 3, {17.38, 78.48}, 0.28, 0.40, 0.07, 3.8, 0.32, 5, 0},
    {"dc08-columbus", 0, {39.96, -82.99}, 0.52, 0.80, 0.10, 4.2, 0.30, 4, 0},
    {"dc09-paris", 2, {48.86, 2.35}, 0.06, 0.35, 0.18, 5.0, 0.26, 0, 3},
    {"dc10-vegas", 1, {36.11, -115.17}, 0.25, 0.30, 0.11, 3.0, 0.38, 6, 0},
    {"dc11-singapore", 3, {1.35, 103.82}, 0.45, 0.50, 0.16, 3.0, 0.34, 0, 3},
};

int hops_between(int dc_index, int dc_region, int region) {
    if (dc_region == region) return 2 + dc_index % 2;
    return 8 + (dc_index + 3 * region) % 6;
}

LLMModelProfile chat_small() {
    LLMModelProfile m;
    m.id = "chat-s";
    m.mem_footprint_gb = 19.0;
    m.kv_per_token_mb = 0.5;
    m.exec_ms_per_token = {{GpuKind::A100, 30.0}, {GpuKind::H100, 18.0}};
    return m;
}

LLMModelProfile chat_large() {
    LLMModelProfile m;
    m.id = "chat-l";
    m.mem_footprint_gb = 140.0;
    m.kv_per_token_mb = 2.0;
    m.exec_ms_per_token = {{GpuKind::A100, 55.0}, {GpuKind::H100, 32.0}};
    return m;
}

NodeType a100x8() {
    NodeType n;
    n.id = "a100x8";
    n.gpu_kind = GpuKind::A100;
    n.gpu_count = 8;
    n.mem_total_gb = 640.0;
    n.bandwidth_gbps = 64.0;
    n.tdp_kw = 4.4;
    n.pstate_fractions = {0.10, 0.55, 1.0};
    return n;
}

NodeType h100x8() {
    NodeType n;
    n.id = "h100x8";
    n.gpu_kind = GpuKind::H100;
    n.gpu_count = 8;
    n.mem_total_gb = 640.0;
    n.bandwidth_gbps = 128.0;
    n.tdp_kw = 6.8;
    n.pstate_fractions = {0.08, 0.50, 1.0};
    return n;
}

}  // namespace

Scenario default_scenario(int num_datacenters, int epochs) {
    if (num_datacenters < 1 || num_datacenters > 12)
        throw std::invalid_argument("default_scenario: 1..12 datacenters");
    if (epochs < 1) throw std::invalid_argument("default_scenario: epochs >= 1");

    Scenario s;
    s.epochs = epochs;
    s.epoch_hours = 0.25;
    s.sla_ttft_s = 2.0;
    s.models = {chat_small(), chat_large()};
    s.node_types = {a100x8(), h100x8()};
    s.regions.assign(std::begin(kRegions), std::end(kRegions));
    for (int r = 0; r < 4; ++r)
        s.network.region_coords[kRegions[r]] = kRegionCoords[r];

    for (int i = 0; i < num_datacenters; ++i) {
        const DcSpec& spec = kPool[i];
        Datacenter dc;
        dc.id = spec.id;
        dc.location = spec.loc;
        if (spec.a100_nodes > 0) dc.node_counts.emplace_back(0, spec.a100_nodes);
        if (spec.h100_nodes > 0) dc.node_counts.emplace_back(1, spec.h100_nodes);
        dc.cop = spec.cop;
        dc.gi_l_per_kwh = spec.gi;
        dc.phi = spec.phi;
        // Carbon follows local solar (cleanest mid-day), price follows local
        // demand (peaks offset from the carbon trough).
        const double local = static_cast<double>(spec.region) / 4.0;
        dc.ci_series =
            diurnal_series(epochs, s.epoch_hours, spec.ci_base, 0.35, local + 0.15);
        dc.tou_series =
            diurnal_series(epochs, s.epoch_hours, spec.tou_base, 0.50, local - 0.20);
        for (int r = 0; r < 4; ++r)
            dc.hop_counts[kRegions[r]] = hops_between(i, spec.region, r);
        s.datacenters.push_back(std::move(dc));
    }
    return s;
}

Scenario contrast_scenario(int objective, int epochs) {
    if (objective < 0 || objective >= kNumObjectives)
        throw std::invalid_argument("contrast_scenario: objective 0..3");
    if (epochs < 1) throw std::invalid_argument("contrast_scenario: epochs >= 1");

    Scenario s;
    s.epochs = epochs;
    s.epoch_hours = 0.25;
    s.sla_ttft_s = 2.0;
    s.models = {chat_small()};
    s.node_types = {a100x8()};
    s.regions = {"us-east"};
    s.network.region_coords["us-east"] = kRegionCoords[0];

    const LatLon near = {39.04, -77.49};    // ~200 km from the region
    const LatLon far = {1.35, 103.82};      // ~15,000 km away
    // DC 0 wins only the target objective; DC 1 wins everything else.
    struct Knobs {
        LatLon loc;
        int hops;
        double ci, gi, tou, cop;
    };
    Knobs good{near, 2, 0.03, 0.15, 0.02, 8.0};  // best-on-everything pool
    Knobs poor{far, 14, 0.90, 6.00, 0.60, 3.0};  // worst-on-everything pool

    auto pick = [&](bool winner, int j) {
        // The winning DC takes the good value on objective j, poor values
        // elsewhere; the other DC takes the reverse.
        Knobs k = winner ? poor : good;
        Knobs from = winner ? good : poor;
        switch (j) {
            case 0:
                k.loc = from.loc;
                k.hops = from.hops;
                break;
            case 1: k.ci = from.ci; break;
            case 2:
                k.gi = from.gi;
                k.cop = from.cop;
                break;
            case 3: k.tou = from.tou; break;
        }
        return k;
    };

    const char* names[2] = {"dc-target", "dc-other"};
    for (int d = 0; d < 2; ++d) {
        const Knobs k = pick(d == 0, objective);
        Datacenter dc;
        dc.id = names[d];
        dc.location = k.loc;
        dc.node_counts.emplace_back(0, 4);
        dc.cop = k.cop;
        dc.gi_l_per_kwh = k.gi;
        dc.phi = 0.30;
        dc.ci_series = flat_series(epochs, k.ci);
        dc.tou_series = flat_series(epochs, k.tou);
        dc.hop_counts["us-east"] = k.hops;
        s.datacenters.push_back(std::move(dc));
    }
    return s;
}

}  // namespace marlin
