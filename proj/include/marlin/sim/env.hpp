#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "marlin/core/plan.hpp"
#include "marlin/core/scenario.hpp"
#include "marlin/core/types.hpp"
#include "marlin/physics/allocation.hpp"
#include "marlin/physics/models.hpp"

namespace marlin {

// A request group deferred to the next epoch at one datacenter.
struct QueuedGroup {
    int model = -1;
    int origin_region = -1;
    int count = 0;
    double avg_input_tokens = 0.0;
    double avg_output_tokens = 0.0;
    double delay_s = 0.0;  // accumulated waiting time so far
};

struct NodeState {
    int node_type = -1;
    std::vector<int> resident_models;
};

struct DcState {
    std::vector<NodeState> nodes;  // ordered by (type, index)
    std::vector<QueuedGroup> queue;
    int cursor = 0;  // round-robin scan start, rotates each epoch
};

struct DcSnapshot {
    double ci = 0.0;
    double gi = 0.0;
    double tou = 0.0;
    double cop = 1.0;
    double availability = 1.0;  // 1 - previous-epoch utilization
};

struct EnvState {
    int epoch = 0;
    std::vector<DcState> dcs;
    std::vector<DcSnapshot> snapshots;    // refreshed on every advance
    std::vector<double> forecast;         // per (model, region), row-major
};

struct DcEpochResult {
    MetricsVector metrics;  // ttft_s is the summed TTFT of requests served here
    double e_it_kwh = 0.0;
    int served = 0;
    int queued = 0;
    int sla_violations = 0;
    double utilization = 0.0;  // active nodes / total nodes
};

struct EpochResult {
    MetricsVector metrics;  // totals across datacenters
    double mean_ttft_s = 0.0;
    int served = 0;
    int queued = 0;
    int sla_violations = 0;     // (model, region) groups breaching SLA, per DC
    double idle_fraction = 0.0; // nodes idle or off across the fleet
    std::vector<DcEpochResult> per_dc;
    EpochAllocation allocation;
};

// Per-metric reference scales that make the four objectives commensurable.
struct Normalizers {
    std::array<double, kNumObjectives> ref{1.0, 1.0, 1.0, 1.0};

    double normalized(const MetricsVector& m, int j) const {
        return m[j] / ref[j];
    }
    bool valid() const {
        for (double r : ref)
            if (!(r > 0.0)) return false;
        return true;
    }
};

// Weighted scalarization of a metrics vector against reference scales.
double weighted_objective(const MetricsVector& metrics, const ObjectiveWeights& w,
                          const Normalizers& n);

// Epoch-stepped simulator. Holds the immutable scenario plus precomputed
// latency tables; all mutable progress lives in EnvState so that what-if
// evaluation and committed steps share one code path.
class Environment {
  public:
    explicit Environment(const Scenario& scenario);

    const Scenario& scenario() const { return *scenario_; }

    EnvState initial_state() const;

    // Pure what-if evaluation: no state is committed.
    EpochResult evaluate_plan(const EnvState& state, const EpochWorkload& workload,
                              const SchedulingPlan& plan) const;

    // Commits the epoch: advances residency, queue, cursor, and snapshots.
    EpochResult apply_plan(EnvState& state, const EpochWorkload& workload,
                           const SchedulingPlan& plan) const;

    // Flattened per-DC observation: [availability, queue backlog, ci, gi,
    // tou, cop] per datacenter at the state's epoch.
    std::vector<double> state_features(const EnvState& state) const;
    int state_dim() const;

    // One-way region->DC latency in seconds, precomputed.
    double network_latency_s(int region, int dc) const {
        return net_latency_s_[region * num_dcs_ + dc];
    }

  private:
    EpochResult simulate(const EnvState& state, const EpochWorkload& workload,
                         const SchedulingPlan& plan, EnvState* next) const;

    const Scenario* scenario_;
    int num_models_ = 0;
    int num_regions_ = 0;
    int num_dcs_ = 0;
    std::vector<double> net_latency_s_;  // region-major [region][dc]
    std::vector<double> exec_s_;         // model-major [model][node_type]
};

// Splits `total` integer requests across fractions (largest-remainder
// rounding; conservation is exact and ties break on lower index).
std::vector<int> split_largest_remainder(int total, std::span<const double> fractions);

// Per-epoch CSV rows: epoch,dc,ttft_s,carbon_kg,water_l,cost_usd,e_it_kwh,
// queued,sla_violations.
std::string epoch_csv_header();
void append_epoch_csv(std::ostream& out, const Scenario& s, int epoch,
                      const EpochResult& result);

}  // namespace marlin
