#pragma once

#include <array>

#include "marlin/core/types.hpp"
#include "marlin/neural/replay.hpp"
#include "marlin/sim/env.hpp"

namespace marlin {

struct RewardConfig {
    double ema_weight = 0.1;  // weight on the trailing-score term
    double ema_alpha = 0.2;   // smoothing of the trailing score
    double c_eco = 0.1;       // idle-fleet bonus coefficient
    double c_sla = 1.0;       // relative SLA-excess penalty coefficient
};

// Objective-weighted L2 distance between normalized metric vectors. With a
// fresh goal of zero and a single-objective weight vector this reduces to the
// agent's own normalized metric, so one formula serves both fresh and
// hindsight-relabeled samples.
double goal_distance(const std::array<double, kGoalDim>& achieved,
                     const std::array<double, kGoalDim>& goal,
                     const ObjectiveWeights& w);

struct RewardInputs {
    std::array<double, kGoalDim> achieved{};  // normalized epoch metrics
    double idle_fraction = 0.0;
    double mean_ttft_s = 0.0;
    double sla_s = 2.0;
    double ema_score = 0.0;  // trailing score; 0 with no history
};

// r = ema_weight * EMA + c_eco * idle - goal_distance - c_sla * SLA excess.
// base_out, when given, receives everything except the goal-distance term,
// which is what hindsight relabeling recomputes.
double unified_reward(const RewardInputs& in, const RewardConfig& cfg,
                      const ObjectiveWeights& w,
                      const std::array<double, kGoalDim>& goal,
                      double* base_out = nullptr);

// Normalized metric 4-vector for reward and capital bookkeeping.
std::array<double, kGoalDim> normalized_metrics(const MetricsVector& m,
                                                const Normalizers& n);

}  // namespace marlin
