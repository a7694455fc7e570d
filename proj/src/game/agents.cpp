#include "marlin/game/agents.hpp"

#include <stdexcept>
#include <thread>
#include <utility>

namespace marlin {

MarlinAgent::MarlinAgent(const AgentConfig& cfg, const PlanActionMap* map,
                         Rng& init_rng)
    : cfg_(cfg),
      weights_(ObjectiveWeights::single(cfg.objective)),
      sac_(cfg.sac, init_rng),
      buffer_(cfg.current_capacity, cfg.cross_capacity,
              cfg.use_dual_buffer ? cfg.current_fraction : 1.0),
      map_(map) {
    if (!map_) throw std::invalid_argument("MarlinAgent: action map is required");
    if (cfg.objective < 0 || cfg.objective >= kNumObjectives)
        throw std::invalid_argument("MarlinAgent: objective index out of range");
    sac_.set_action_map(map_);
}

Proposal MarlinAgent::evaluate_action(const Environment& env, const EnvState& state,
                                      const EpochWorkload& workload,
                                      std::vector<double> action,
                                      const Normalizers& norms,
                                      double* base_out) const {
    const auto& s = env.scenario();
    auto plan = SchedulingPlan::from_routing(s.models.size(), s.regions.size(),
                                             s.datacenters.size(), action);
    const EpochResult res = env.evaluate_plan(state, workload, plan);

    RewardInputs in;
    in.achieved = normalized_metrics(res.metrics, norms);
    in.idle_fraction = res.idle_fraction;
    in.mean_ttft_s = res.mean_ttft_s;
    in.sla_s = s.sla_ttft_s;
    in.ema_score = ema_score_;

    Proposal p;
    p.plan = {plan.flat().begin(), plan.flat().end()};
    p.metrics = res.metrics;
    p.achieved = in.achieved;
    const std::array<double, kGoalDim> fresh_goal{};
    p.reward = unified_reward(in, cfg_.reward, weights_, fresh_goal, base_out);
    return p;
}

Proposal MarlinAgent::evaluate_proposal(const Environment& env,
                                        const EnvState& state,
                                        const EpochWorkload& workload,
                                        std::vector<double> plan,
                                        const Normalizers& norms) const {
    return evaluate_action(env, state, workload, std::move(plan), norms, nullptr);
}

Proposal MarlinAgent::train_epoch(const Environment& env, const EnvState& state,
                                  const EpochWorkload& workload,
                                  std::span<const double> context,
                                  const Normalizers& norms, Rng& rng) {
    buffer_.clear_current();
    const auto features = env.state_features(state);
    const std::array<double, kGoalDim> fresh_goal{};

    for (int k = 0; k < cfg_.k_opt; ++k) {
        auto sample = sac_.sample_action(features, fresh_goal, context, rng);
        auto action = map_->apply(sample.squashed);

        double base = 0.0;
        Proposal probe =
            evaluate_action(env, state, workload, action, norms, &base);

        Transition t;
        t.state = features;
        t.context = {context.begin(), context.end()};
        t.goal = fresh_goal;
        t.action = std::move(probe.plan);
        t.achieved = probe.achieved;
        t.reward = probe.reward;
        t.base_reward = base;
        // Each what-if round is a one-step episode against the frozen epoch
        // snapshot: the critics regress to the immediate reward.
        t.terminal = true;
        buffer_.push_current(std::move(t));

        sac_.update(buffer_.sample(cfg_.batch_size, rng), rng);
    }

    // Exploit-mode proposal; its outcome is the relabeling target. The
    // evaluation is a free what-if sample, so it also joins the buffer and
    // anchors the critics at the policy mean.
    auto det = sac_.sample_action(features, fresh_goal, context, rng,
                                  /*deterministic=*/true);
    double det_base = 0.0;
    Proposal best = evaluate_action(env, state, workload,
                                    map_->apply(det.squashed), norms, &det_base);
    {
        Transition t;
        t.state = features;
        t.context = {context.begin(), context.end()};
        t.goal = fresh_goal;
        t.action = best.plan;
        t.achieved = best.achieved;
        t.reward = best.reward;
        t.base_reward = det_base;
        t.terminal = true;
        buffer_.push_current(std::move(t));
    }

    if (cfg_.use_her && cfg_.use_dual_buffer) {
        her_relabel(buffer_, best.achieved, cfg_.her_k, rng,
                    [this](const Transition& t,
                           const std::array<double, kGoalDim>& g) {
                        return goal_distance(t.achieved, g, weights_);
                    });
    }

    const double score = -goal_distance(best.achieved, fresh_goal, weights_);
    if (!ema_started_) {
        ema_score_ = score;
        ema_started_ = true;
    } else {
        ema_score_ = cfg_.reward.ema_alpha * score +
                     (1.0 - cfg_.reward.ema_alpha) * ema_score_;
    }
    return best;
}

std::vector<Proposal> phase1_train_epoch(std::vector<MarlinAgent>& agents,
                                         const Environment& env,
                                         const EnvState& state,
                                         const EpochWorkload& workload,
                                         std::span<const double> context,
                                         const Normalizers& norms,
                                         std::uint64_t seed_base, int epoch) {
    std::vector<Proposal> proposals(agents.size());
    std::vector<std::thread> workers;
    workers.reserve(agents.size());
    for (std::size_t j = 0; j < agents.size(); ++j) {
        workers.emplace_back([&, j] {
            Rng rng = Rng::stream(seed_base, j + 1,
                                  static_cast<std::uint64_t>(epoch) + 1);
            proposals[j] =
                agents[j].train_epoch(env, state, workload, context, norms, rng);
        });
    }
    for (auto& w : workers) w.join();
    return proposals;
}

}  // namespace marlin
