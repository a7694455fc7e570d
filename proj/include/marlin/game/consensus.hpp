#pragma once

#include <array>
#include <deque>
#include <span>
#include <vector>

#include "marlin/game/agents.hpp"

namespace marlin {

// Critic interface the consensus round optimizes against. Production wraps
// each agent's trained twin critics at the current state; tests install
// closed-form stubs.
class CriticView {
  public:
    virtual ~CriticView() = default;
    virtual double value(std::span<const double> plan) = 0;
    // dQ/dplan at the given plan.
    virtual std::vector<double> grad(std::span<const double> plan) = 0;
};

// CriticView over a trained agent's critics at a fixed state, acting goal
// (all zeros) appended.
class AgentCriticView : public CriticView {
  public:
    AgentCriticView(SacAgent& agent, std::vector<double> state_features)
        : agent_(&agent), features_(std::move(state_features)) {}

    double value(std::span<const double> plan) override {
        return agent_->critic_value(features_, goal_, plan);
    }
    std::vector<double> grad(std::span<const double> plan) override {
        std::vector<double> g;
        agent_->critic_value(features_, goal_, plan, &g);
        return g;
    }

  private:
    SacAgent* agent_;
    std::vector<double> features_;
    std::array<double, kGoalDim> goal_{};
};

struct CapitalConfig {
    double c_min = 0.0;
    double c_max = 300.0;
    double c_init = 100.0;
    double eta = 0.1;   // capital EMA rate
    double beta = 0.7;  // performance-vs-alignment mix
    double veto_capital_threshold = 150.0;
    double veto_max_pull = 0.5;
    double delta_iqr_fraction = 0.1;  // delta_thresh = fraction x IQR of Q
    std::size_t q_window = 512;       // Q samples kept for the IQR
    std::size_t min_q_samples = 16;   // below this, delta_thresh = +inf
};

// Per-agent influence currency. Capital grows toward how well the consensus
// served the agent and how aligned its proposal was, and gates veto rights.
class CapitalLedger {
  public:
    CapitalLedger() = default;
    explicit CapitalLedger(int num_agents, CapitalConfig cfg = {});

    const CapitalConfig& config() const { return cfg_; }
    int agents() const { return static_cast<int>(capitals_.size()); }
    double capital(int j) const { return capitals_.at(j); }
    std::span<const double> capitals() const { return capitals_; }
    void set_capital(int j, double c);

    // Feeds one observed critic value into the running spread estimate.
    void record_q(double q);
    std::size_t q_samples() const { return q_history_.size(); }

    // Utility-loss veto threshold: a fixed fraction of the interquartile
    // range of recorded Q values; +inf until enough samples accumulate.
    double delta_thresh() const;

    // C_j <- clamp(C_j + eta * (C_max * (beta*perf + (1-beta)*bonus) - C_j)).
    void update(int j, double perf, double bonus);

  private:
    CapitalConfig cfg_;
    std::vector<double> capitals_;
    std::deque<double> q_history_;
};

struct ConsensusConfig {
    int sgd_steps = 5;
    double sgd_lr = 0.05;
    bool enable_sgd = true;
    bool enable_veto = true;
    int veto_rounds = 1;  // >1 iterates the veto pass to quiescence
};

struct VetoEvent {
    int agent = -1;
    double delta = 0.0;  // utility loss that triggered the veto
    double pull = 0.0;   // applied pull toward the agent's own proposal
};

struct ConsensusResult {
    std::vector<double> plan;           // blended, refined, simplex-valid
    std::vector<double> blend_weights;  // normalized per-agent blend weights
    std::vector<double> q;              // per-agent critic value at own proposal
    std::vector<VetoEvent> vetoes;
};

// The consensus round: value each proposal with its own critic, blend
// proportionally to (scheme weight x shifted value), refine by projected
// gradient ascent on the capital-weighted mean critic, then run the ordered
// veto pass. Scheme weights scale both blending and critic influence so
// single-objective schemes mute the other agents; the balanced scheme
// reduces to the unweighted round.
ConsensusResult consensus_blend(std::span<const Proposal> proposals,
                                std::span<CriticView* const> critics,
                                std::span<const double> scheme_weights,
                                CapitalLedger& ledger, int rows, int dim,
                                const ConsensusConfig& cfg);

// Capital settlement after the blended plan is evaluated: Perf_j rewards how
// well the outcome served objective j, Bonus_j rewards proposal alignment
// with the blend (1 - L1/(2 rows)); both clamped to [0,1].
void update_capitals(CapitalLedger& ledger, std::span<const Proposal> proposals,
                     std::span<const double> blended_plan,
                     const std::array<double, kGoalDim>& blended_achieved,
                     int rows);

}  // namespace marlin
