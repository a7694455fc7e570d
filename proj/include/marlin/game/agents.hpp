#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "marlin/game/reward.hpp"
#include "marlin/game/simplex.hpp"
#include "marlin/neural/replay.hpp"
#include "marlin/neural/sac.hpp"
#include "marlin/sim/env.hpp"

namespace marlin {

// Knobs for one objective agent's inner optimization loop.
struct AgentConfig {
    int objective = 0;  // index into kObjectiveNames
    int k_opt = 12;     // what-if samples (and gradient steps) per epoch
    int batch_size = 32;
    int her_k = 8;  // hindsight relabels pushed to the cross buffer
    std::size_t current_capacity = 20000;
    std::size_t cross_capacity = 5000;
    double current_fraction = 0.7;
    RewardConfig reward;
    SacConfig sac;
    bool use_dual_buffer = true;  // off: sample current-only, drop relabels
    bool use_her = true;          // off: no hindsight relabeling
};

// One agent's epoch outcome entering the consensus round.
struct Proposal {
    std::vector<double> plan;  // flat simplex-projected routing tensor
    MetricsVector metrics;     // what-if totals under the planning workload
    std::array<double, kGoalDim> achieved{};  // normalized metrics
    double reward = 0.0;
};

// A single objective's learner: a SAC policy over routing plans with its own
// dual replay buffer and trailing-score state. Training runs entirely against
// what-if evaluations of one frozen epoch state, so each epoch is a
// contextual bandit round; the exploit-mode action becomes the proposal.
class MarlinAgent {
  public:
    MarlinAgent() = default;
    MarlinAgent(const AgentConfig& cfg, const PlanActionMap* map, Rng& init_rng);

    // One inner optimization round: clear the per-epoch buffer, then k_opt
    // iterations of sample -> project -> what-if evaluate -> reward -> store
    // -> SAC step. Afterwards evaluates the deterministic action, relabels
    // hindsight copies into the cross buffer against its outcome, refreshes
    // the trailing score, and returns the proposal.
    Proposal train_epoch(const Environment& env, const EnvState& state,
                         const EpochWorkload& workload,
                         std::span<const double> context, const Normalizers& norms,
                         Rng& rng);

    // Evaluates a flat plan against this agent's reward without training.
    Proposal evaluate_proposal(const Environment& env, const EnvState& state,
                               const EpochWorkload& workload,
                               std::vector<double> plan,
                               const Normalizers& norms) const;

    SacAgent& sac() { return sac_; }
    const SacAgent& sac() const { return sac_; }
    DualReplayBuffer& buffer() { return buffer_; }
    const DualReplayBuffer& buffer() const { return buffer_; }
    const AgentConfig& config() const { return cfg_; }
    const ObjectiveWeights& objective_weights() const { return weights_; }
    double ema_score() const { return ema_score_; }

  private:
    Proposal evaluate_action(const Environment& env, const EnvState& state,
                             const EpochWorkload& workload,
                             std::vector<double> action, const Normalizers& norms,
                             double* base_out) const;

    AgentConfig cfg_;
    ObjectiveWeights weights_;  // single-objective basis vector
    SacAgent sac_;
    DualReplayBuffer buffer_;
    const PlanActionMap* map_ = nullptr;  // not owned
    double ema_score_ = 0.0;
    bool ema_started_ = false;
};

// Phase-1 round for all agents, one thread per agent. Each agent draws from
// its own deterministic stream keyed by (seed_base, agent index, epoch), so
// results are independent of scheduling order.
std::vector<Proposal> phase1_train_epoch(std::vector<MarlinAgent>& agents,
                                         const Environment& env,
                                         const EnvState& state,
                                         const EpochWorkload& workload,
                                         std::span<const double> context,
                                         const Normalizers& norms,
                                         std::uint64_t seed_base, int epoch);

}  // namespace marlin
