#include "marlin/game/reward.hpp"

#include <algorithm>
#include <cmath>

namespace marlin {

double goal_distance(const std::array<double, kGoalDim>& achieved,
                     const std::array<double, kGoalDim>& goal,
                     const ObjectiveWeights& w) {
    double sq = 0.0;
    for (int j = 0; j < kGoalDim; ++j) {
        const double d = achieved[j] - goal[j];
        sq += w.w[j] * d * d;
    }
    return std::sqrt(sq);
}

double unified_reward(const RewardInputs& in, const RewardConfig& cfg,
                      const ObjectiveWeights& w,
                      const std::array<double, kGoalDim>& goal, double* base_out) {
    const double sla_excess =
        in.sla_s > 0.0 ? std::max(0.0, (in.mean_ttft_s - in.sla_s) / in.sla_s) : 0.0;
    const double base = cfg.ema_weight * in.ema_score + cfg.c_eco * in.idle_fraction -
                        cfg.c_sla * sla_excess;
    if (base_out) *base_out = base;
    return base - goal_distance(in.achieved, goal, w);
}

std::array<double, kGoalDim> normalized_metrics(const MetricsVector& m,
                                                const Normalizers& n) {
    std::array<double, kGoalDim> out{};
    for (int j = 0; j < kGoalDim; ++j) out[j] = n.normalized(m, j);
    return out;
}

}  // namespace marlin
