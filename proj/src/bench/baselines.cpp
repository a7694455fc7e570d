#include "marlin/bench/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace marlin {

const char* to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::round_robin: return "round_robin";
        case BaselineKind::random_plan: return "random";
        case BaselineKind::greedy_latency: return "greedy_latency";
        case BaselineKind::greedy_carbon: return "greedy_carbon";
        case BaselineKind::greedy_water: return "greedy_water";
        case BaselineKind::greedy_cost: return "greedy_cost";
        case BaselineKind::tabular_q: return "tabular_q";
    }
    return "round_robin";
}

BaselineKind baseline_from_string(const std::string& name) {
    for (BaselineKind k : kAllBaselines)
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown baseline: " + name);
}

std::vector<BaselineKind> parse_baseline_list(const std::string& csv) {
    if (csv.empty() || csv == "all")
        return {std::begin(kAllBaselines), std::end(kAllBaselines)};
    std::vector<BaselineKind> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(baseline_from_string(tok));
    return out;
}

BaselineScheduler::BaselineScheduler(BaselineKind kind, std::uint64_t seed,
                                     const Environment& env,
                                     const Normalizers& norms)
    : kind_(kind),
      rng_(Rng::stream(seed, 0x6261u, static_cast<std::uint64_t>(kind))),
      env_(&env),
      norms_(norms) {
    const auto& s = env.scenario();
    if (kind_ == BaselineKind::tabular_q) {
        q_.assign(s.models.size(),
                  std::vector<double>(static_cast<std::size_t>(kTimeBuckets) *
                                          s.datacenters.size(),
                                      0.0));
        last_choice_.assign(s.models.size(), -1);
    }
}

int BaselineScheduler::time_bucket(int epoch) const {
    const double epochs_per_day =
        std::max(1.0, 24.0 / env_->scenario().epoch_hours);
    const double day_pos =
        std::fmod(static_cast<double>(epoch), epochs_per_day) / epochs_per_day;
    return std::min(kTimeBuckets - 1,
                    static_cast<int>(day_pos * kTimeBuckets));
}

SchedulingPlan BaselineScheduler::greedy_plan(const EnvState& state,
                                              const EpochWorkload& workload,
                                              int objective) {
    const auto& s = env_->scenario();
    const int models = static_cast<int>(s.models.size());
    const int regions = static_cast<int>(s.regions.size());
    const int dcs = static_cast<int>(s.datacenters.size());
    int best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    for (int d = 0; d < dcs; ++d) {
        std::vector<double> routing(
            static_cast<std::size_t>(models) * regions * dcs, 0.0);
        for (int row = 0; row < models * regions; ++row)
            routing[static_cast<std::size_t>(row) * dcs + d] = 1.0;
        const auto pure =
            SchedulingPlan::from_routing(models, regions, dcs, routing);
        const EpochResult probe = env_->evaluate_plan(state, workload, pure);
        if (probe.metrics[objective] < best_metric) {
            best_metric = probe.metrics[objective];
            best = d;
        }
    }
    std::vector<double> routing(static_cast<std::size_t>(models) * regions * dcs,
                                0.0);
    for (int row = 0; row < models * regions; ++row)
        routing[static_cast<std::size_t>(row) * dcs + best] = 1.0;
    return SchedulingPlan::from_routing(models, regions, dcs, routing);
}

SchedulingPlan BaselineScheduler::plan(const EnvState& state,
                                       const EpochWorkload& workload) {
    const auto& s = env_->scenario();
    const int models = static_cast<int>(s.models.size());
    const int regions = static_cast<int>(s.regions.size());
    const int dcs = static_cast<int>(s.datacenters.size());
    switch (kind_) {
        case BaselineKind::round_robin:
            return SchedulingPlan::uniform(models, regions, dcs);
        case BaselineKind::random_plan: {
            std::vector<double> routing;
            routing.reserve(static_cast<std::size_t>(models) * regions * dcs);
            for (int row = 0; row < models * regions; ++row) {
                const auto r = rng_.dirichlet_flat(static_cast<std::size_t>(dcs));
                routing.insert(routing.end(), r.begin(), r.end());
            }
            return SchedulingPlan::from_routing(models, regions, dcs,
                                                std::move(routing));
        }
        case BaselineKind::greedy_latency:
            return greedy_plan(state, workload, 0);
        case BaselineKind::greedy_carbon:
            return greedy_plan(state, workload, 1);
        case BaselineKind::greedy_water:
            return greedy_plan(state, workload, 2);
        case BaselineKind::greedy_cost:
            return greedy_plan(state, workload, 3);
        case BaselineKind::tabular_q: {
            last_bucket_ = time_bucket(state.epoch);
            std::vector<double> routing(
                static_cast<std::size_t>(models) * regions * dcs, 0.0);
            for (int m = 0; m < models; ++m) {
                int choice;
                if (rng_.uniform() < q_eps_) {
                    choice = static_cast<int>(rng_.below(dcs));
                } else {
                    choice = 0;
                    const auto& row = q_[m];
                    for (int d = 1; d < dcs; ++d)
                        if (row[last_bucket_ * dcs + d] >
                            row[last_bucket_ * dcs + choice])
                            choice = d;
                }
                last_choice_[m] = choice;
                for (int r = 0; r < regions; ++r)
                    routing[(static_cast<std::size_t>(m) * regions + r) * dcs +
                            choice] = 1.0;
            }
            q_eps_ = std::max(0.02, q_eps_ * 0.995);
            return SchedulingPlan::from_routing(models, regions, dcs,
                                                std::move(routing));
        }
    }
    throw std::logic_error("unreachable baseline kind");
}

void BaselineScheduler::observe(const EnvState& state,
                                const EpochResult& result) {
    if (kind_ != BaselineKind::tabular_q || last_bucket_ < 0) return;
    const auto& s = env_->scenario();
    const int dcs = static_cast<int>(s.datacenters.size());
    const double reward =
        -weighted_objective(result.metrics, ObjectiveWeights{}, norms_);
    const int next_bucket = time_bucket(state.epoch);
    for (std::size_t m = 0; m < q_.size(); ++m) {
        if (last_choice_[m] < 0) continue;
        auto& row = q_[m];
        double next_best = row[next_bucket * dcs];
        for (int d = 1; d < dcs; ++d)
            next_best = std::max(next_best, row[next_bucket * dcs + d]);
        double& qv = row[last_bucket_ * dcs + last_choice_[m]];
        qv += q_lr_ * (reward + q_gamma_ * next_best - qv);
    }
}

}  // namespace marlin
