#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "marlin/neural/film.hpp"
#include "marlin/neural/mlp.hpp"
#include "marlin/neural/replay.hpp"

namespace marlin {

// Maps a squashed policy sample in (-1,1)^A onto the feasible action the
// critics evaluate, with an analytic backward. Identity by default; the
// scheduler installs a per-row simplex projection.
class ActionMap {
  public:
    virtual ~ActionMap() = default;
    virtual std::vector<double> apply(std::span<const double> squashed) const {
        return {squashed.begin(), squashed.end()};
    }
    // d_mapped is dL/d(mapped); returns dL/d(squashed).
    virtual std::vector<double> backward(std::span<const double> squashed,
                                         std::span<const double> mapped,
                                         std::span<const double> d_mapped) const {
        (void)squashed;
        (void)mapped;
        return {d_mapped.begin(), d_mapped.end()};
    }
};

struct SacConfig {
    int state_dim = 0;    // environment feature size (goal appended internally)
    int context_dim = 0;  // modulation context size
    int action_dim = 0;   // flattened plan size
    int actor_hidden = 128;
    int critic_hidden = 256;
    int film_hidden = 64;
    double gamma = 0.95;
    double tau = 0.005;
    double actor_lr = 3e-4;
    double critic_lr = 1e-3;
    double alpha_lr = 3e-4;
    double init_alpha = 0.2;
    bool use_film = true;

    int obs_dim() const { return state_dim + kGoalDim; }
    double target_entropy() const { return -static_cast<double>(action_dim); }
};

// One reparameterized draw from the policy, with everything backward needs.
struct ActorSample {
    std::vector<double> squashed;  // tanh(pre), in (-1,1)^A
    std::vector<double> pre;
    std::vector<double> mu;
    std::vector<double> log_std;
    std::vector<double> sigma;
    std::vector<double> eps;
    double log_prob = 0.0;
    Mlp::Cache actor_cache;
    Mlp::Cache film_cache;
    bool modulated = false;
    bool deterministic = false;
};

struct SacLosses {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double alpha_loss = 0.0;
    double alpha = 0.0;
    double mean_q = 0.0;
};

// Soft actor-critic over one scheduling objective: squashed-Gaussian actor
// with optional feature-wise modulation, twin critics with tau-averaged
// targets, and an auto-tuned entropy temperature.
class SacAgent {
  public:
    SacAgent() = default;
    SacAgent(const SacConfig& cfg, Rng& init_rng);

    const SacConfig& config() const { return cfg_; }

    void set_action_map(const ActionMap* map) { action_map_ = map; }
    const ActionMap& action_map() const;

    ActorSample sample_action(std::span<const double> state,
                              const std::array<double, kGoalDim>& goal,
                              std::span<const double> context, Rng& rng,
                              bool deterministic = false) const;

    // Agent value of an action (min of the twin critics). When grad_action is
    // non-null it receives dQ/daction of the minimizing twin.
    double critic_value(std::span<const double> state,
                        const std::array<double, kGoalDim>& goal,
                        std::span<const double> action,
                        std::vector<double>* grad_action = nullptr);

    // One SAC step on the batch: twin-critic regression to the entropy-
    // regularized bootstrap target, a reparameterized actor step, a
    // temperature step, then the tau-soft target update.
    SacLosses update(const std::vector<const Transition*>& batch, Rng& rng);

    double alpha() const;
    double& log_alpha() { return log_alpha_; }

    Mlp& actor() { return actor_; }
    FilmGenerator& film() { return film_; }
    Mlp& critic1() { return critic1_; }
    Mlp& critic2() { return critic2_; }
    Mlp& target1() { return target1_; }
    Mlp& target2() { return target2_; }
    const Mlp& actor() const { return actor_; }
    const FilmGenerator& film() const { return film_; }
    const Mlp& critic1() const { return critic1_; }
    const Mlp& critic2() const { return critic2_; }
    const Mlp& target1() const { return target1_; }
    const Mlp& target2() const { return target2_; }
    double log_alpha() const { return log_alpha_; }

  private:
    std::vector<double> make_obs(std::span<const double> state,
                                 const std::array<double, kGoalDim>& goal) const;
    void actor_backward(const ActorSample& sample,
                        std::span<const double> d_squashed, double d_log_prob);

    SacConfig cfg_;
    Mlp actor_;
    FilmGenerator film_;
    Mlp critic1_, critic2_;
    Mlp target1_, target2_;
    double log_alpha_ = 0.0;
    Adam adam_actor_, adam_film_, adam_c1_, adam_c2_;
    const ActionMap* action_map_ = nullptr;  // not owned
};

}  // namespace marlin
