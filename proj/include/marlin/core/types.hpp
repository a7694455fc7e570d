#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace marlin {

enum class GpuKind { A100, H100 };

inline const char* to_string(GpuKind k) { return k == GpuKind::A100 ? "A100" : "H100"; }

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

// Per-model-class execution and memory profile. exec_ms_per_token is the
// per-output-token slope of the profiled execution time, keyed by GPU kind.
struct LLMModelProfile {
    std::string id;
    double mem_footprint_gb = 0.0;
    double kv_per_token_mb = 0.0;
    std::map<GpuKind, double> exec_ms_per_token;
};

// A node class: identical GPUs with pooled memory, preset performance states
// drawing fixed fractions of TDP. pstate_fractions sorted ascending in (0,1].
struct NodeType {
    std::string id;
    GpuKind gpu_kind = GpuKind::A100;
    int gpu_count = 2;  // 2, 4, or 8
    double mem_total_gb = 0.0;
    double bandwidth_gbps = 0.0;  // slowest path weight-load bandwidth
    double tdp_kw = 0.0;
    std::vector<double> pstate_fractions;

    double idle_fraction() const {
        return pstate_fractions.empty() ? 0.0 : pstate_fractions.front();
    }
    double busy_fraction() const {
        return pstate_fractions.empty() ? 0.0 : pstate_fractions.back();
    }
};

struct Datacenter {
    std::string id;
    LatLon location;
    std::vector<std::pair<int, int>> node_counts;  // (node_type index, count)
    double cop = 0.0;
    double gi_l_per_kwh = 0.0;
    double phi = 0.0;  // blowdown pollutant threshold, in [0,1)
    std::vector<double> ci_series;   // kg CO2 per kWh, per epoch
    std::vector<double> tou_series;  // $ per kWh, per epoch
    std::map<std::string, int> hop_counts;  // origin region -> hops

    int total_nodes() const {
        int n = 0;
        for (auto& [t, c] : node_counts) n += c;
        return n;
    }
};

struct WorkloadEntry {
    int model = 0;   // index into Scenario::models
    int region = 0;  // index into Scenario::regions
    long long request_count = 0;
    double avg_output_tokens = 0.0;
    double avg_input_tokens = 0.0;
};

struct EpochWorkload {
    int epoch_index = 0;
    std::vector<WorkloadEntry> entries;

    long long total_requests() const {
        long long n = 0;
        for (auto& e : entries) n += e.request_count;
        return n;
    }
};

struct NetworkParams {
    double lambda_media_ms_per_km = 0.005;  // propagation latency
    double sigma_hop_ms = 0.5;              // per-hop processing
    std::map<std::string, LatLon> region_coords;
};

// One epoch's objective tuple: [LA_tot, Z_tot, G_tot, Cost_tot].
struct MetricsVector {
    double ttft_s = 0.0;
    double carbon_kg = 0.0;
    double water_l = 0.0;
    double cost_usd = 0.0;

    std::array<double, 4> as_array() const { return {ttft_s, carbon_kg, water_l, cost_usd}; }
    static MetricsVector from_array(const std::array<double, 4>& a) {
        return {a[0], a[1], a[2], a[3]};
    }
    double operator[](int j) const { return as_array()[static_cast<std::size_t>(j)]; }
    bool finite() const {
        for (double v : as_array())
            if (!std::isfinite(v) || v < 0.0) return false;
        return true;
    }
    MetricsVector& operator+=(const MetricsVector& o) {
        ttft_s += o.ttft_s;
        carbon_kg += o.carbon_kg;
        water_l += o.water_l;
        cost_usd += o.cost_usd;
        return *this;
    }
};

inline constexpr int kNumObjectives = 4;
inline constexpr const char* kObjectiveNames[kNumObjectives] = {"ttft", "carbon", "water",
                                                                "cost"};

// Pareto dominance with all objectives minimized: a is no worse everywhere
// and strictly better somewhere.
inline bool dominates(const MetricsVector& a, const MetricsVector& b) {
    bool strict = false;
    for (int j = 0; j < kNumObjectives; ++j) {
        if (a[j] > b[j]) return false;
        if (a[j] < b[j]) strict = true;
    }
    return strict;
}

struct ObjectiveWeights {
    std::array<double, 4> w = {0.25, 0.25, 0.25, 0.25};

    bool valid(double tol = 1e-9) const {
        double sum = 0.0;
        for (double v : w) {
            if (!(v >= 0.0)) return false;
            sum += v;
        }
        return std::abs(sum - 1.0) <= tol;
    }
    static ObjectiveWeights single(int j) {
        ObjectiveWeights ow;
        ow.w = {0, 0, 0, 0};
        ow.w[static_cast<std::size_t>(j)] = 1.0;
        return ow;
    }
};

}  // namespace marlin
