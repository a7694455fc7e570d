#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marlin/core/plan.hpp"
#include "marlin/sim/env.hpp"
#include "marlin/util/rng.hpp"

namespace marlin {

enum class BaselineKind {
    round_robin,
    random_plan,
    greedy_latency,
    greedy_carbon,
    greedy_water,
    greedy_cost,
    tabular_q,
};

inline constexpr BaselineKind kAllBaselines[] = {
    BaselineKind::round_robin,   BaselineKind::random_plan,
    BaselineKind::greedy_latency, BaselineKind::greedy_carbon,
    BaselineKind::greedy_water,  BaselineKind::greedy_cost,
    BaselineKind::tabular_q,
};

const char* to_string(BaselineKind k);
BaselineKind baseline_from_string(const std::string& name);  // throws
// Comma-separated list; "all" (or empty) expands to every kind.
std::vector<BaselineKind> parse_baseline_list(const std::string& csv);

// Reference schedulers the learned scheduler is compared against. Stateful:
// random draws from a seeded stream, tabular_q learns across epochs from
// observe(); the rest are pure.
class BaselineScheduler {
  public:
    BaselineScheduler(BaselineKind kind, std::uint64_t seed,
                      const Environment& env, const Normalizers& norms);

    BaselineKind kind() const { return kind_; }

    SchedulingPlan plan(const EnvState& state, const EpochWorkload& workload);

    // Post-epoch learning signal (used by tabular_q; no-op otherwise).
    void observe(const EnvState& state, const EpochResult& result);

  private:
    SchedulingPlan greedy_plan(const EnvState& state,
                               const EpochWorkload& workload, int objective);
    int time_bucket(int epoch) const;

    BaselineKind kind_;
    Rng rng_;
    const Environment* env_;
    Normalizers norms_;
    // tabular_q: per-model-class Q tables over (time bucket, dc choice).
    std::vector<std::vector<double>> q_;  // [model][bucket * dcs + dc]
    std::vector<int> last_choice_;        // per model, -1 before first plan
    int last_bucket_ = -1;
    double q_lr_ = 0.1;
    double q_gamma_ = 0.9;
    double q_eps_ = 0.2;
    static constexpr int kTimeBuckets = 8;
};

}  // namespace marlin
