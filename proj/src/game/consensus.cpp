#include "marlin/game/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "marlin/game/simplex.hpp"

namespace marlin {

CapitalLedger::CapitalLedger(int num_agents, CapitalConfig cfg)
    : cfg_(cfg), capitals_(static_cast<std::size_t>(num_agents), cfg.c_init) {
    if (num_agents <= 0)
        throw std::invalid_argument("CapitalLedger: need at least one agent");
    if (!(cfg.c_min <= cfg.c_init && cfg.c_init <= cfg.c_max))
        throw std::invalid_argument("CapitalLedger: c_init outside [c_min, c_max]");
    if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0) || !(cfg.beta >= 0.0 && cfg.beta <= 1.0))
        throw std::invalid_argument("CapitalLedger: eta and beta must be in [0,1]");
}

void CapitalLedger::set_capital(int j, double c) {
    capitals_.at(j) = std::clamp(c, cfg_.c_min, cfg_.c_max);
}

void CapitalLedger::record_q(double q) {
    if (!std::isfinite(q)) return;
    q_history_.push_back(q);
    while (q_history_.size() > cfg_.q_window) q_history_.pop_front();
}

namespace {

// Linear-interpolation quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double CapitalLedger::delta_thresh() const {
    if (q_history_.size() < cfg_.min_q_samples)
        return std::numeric_limits<double>::infinity();
    std::vector<double> sorted(q_history_.begin(), q_history_.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr =
        quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    return cfg_.delta_iqr_fraction * iqr;
}

void CapitalLedger::update(int j, double perf, double bonus) {
    perf = std::clamp(perf, 0.0, 1.0);
    bonus = std::clamp(bonus, 0.0, 1.0);
    const double target =
        cfg_.c_max * (cfg_.beta * perf + (1.0 - cfg_.beta) * bonus);
    double& c = capitals_.at(j);
    c = std::clamp(c + cfg_.eta * (target - c), cfg_.c_min, cfg_.c_max);
}

namespace {

std::vector<double> normalized_or(std::vector<double> v, double fallback) {
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (sum > 0.0) {
        for (double& x : v) x /= sum;
    } else {
        std::fill(v.begin(), v.end(), fallback);
    }
    return v;
}

}  // namespace

ConsensusResult consensus_blend(std::span<const Proposal> proposals,
                                std::span<CriticView* const> critics,
                                std::span<const double> scheme_weights,
                                CapitalLedger& ledger, int rows, int dim,
                                const ConsensusConfig& cfg) {
    const std::size_t n_agents = proposals.size();
    if (n_agents == 0) throw std::invalid_argument("consensus: no proposals");
    if (critics.size() != n_agents || scheme_weights.size() != n_agents ||
        static_cast<std::size_t>(ledger.agents()) != n_agents)
        throw std::invalid_argument("consensus: per-agent input sizes disagree");
    const std::size_t flat_size =
        static_cast<std::size_t>(rows) * static_cast<std::size_t>(dim);
    for (const auto& p : proposals)
        if (p.plan.size() != flat_size)
            throw std::invalid_argument("consensus: proposal size mismatch");

    ConsensusResult out;
    out.q.resize(n_agents);
    for (std::size_t j = 0; j < n_agents; ++j) {
        out.q[j] = critics[j]->value(proposals[j].plan);
        ledger.record_q(out.q[j]);
    }

    // Shift critic values to a positive scale before blending: proportional
    // weights are meaningless with mixed signs. Equal values blend uniformly.
    const auto [min_it, max_it] = std::minmax_element(out.q.begin(), out.q.end());
    std::vector<double> shifted = out.q;
    if (*max_it == *min_it) {
        std::fill(shifted.begin(), shifted.end(), 1.0);
    } else if (*min_it <= 0.0) {
        const double shift = -*min_it + (*max_it - *min_it) / double(n_agents);
        for (double& q : shifted) q += shift;
    }

    std::vector<double> blend(n_agents);
    for (std::size_t j = 0; j < n_agents; ++j)
        blend[j] = scheme_weights[j] * shifted[j];
    if (std::accumulate(blend.begin(), blend.end(), 0.0) <= 0.0) {
        // Degenerate values: fall back to capital-proportional influence.
        for (std::size_t j = 0; j < n_agents; ++j)
            blend[j] = scheme_weights[j] * ledger.capital(j);
    }
    if (std::accumulate(blend.begin(), blend.end(), 0.0) <= 0.0)
        blend.assign(n_agents, 1.0);
    out.blend_weights = normalized_or(std::move(blend), 1.0 / double(n_agents));

    std::vector<double> plan(flat_size, 0.0);
    for (std::size_t j = 0; j < n_agents; ++j)
        for (std::size_t i = 0; i < flat_size; ++i)
            plan[i] += out.blend_weights[j] * proposals[j].plan[i];
    project_rows(plan, rows, dim);

    // Critic influence in refinement is capital-proportional within the
    // scheme's active objectives.
    std::vector<double> omega(n_agents);
    for (std::size_t j = 0; j < n_agents; ++j)
        omega[j] = scheme_weights[j] * ledger.capital(j);
    if (std::accumulate(omega.begin(), omega.end(), 0.0) <= 0.0)
        omega.assign(scheme_weights.begin(), scheme_weights.end());
    omega = normalized_or(std::move(omega), 1.0 / double(n_agents));

    if (cfg.enable_sgd) {
        for (int step = 0; step < cfg.sgd_steps; ++step) {
            std::vector<double> ascent(flat_size, 0.0);
            for (std::size_t j = 0; j < n_agents; ++j) {
                if (omega[j] == 0.0) continue;
                const auto g = critics[j]->grad(plan);
                for (std::size_t i = 0; i < flat_size; ++i)
                    ascent[i] += omega[j] * g[i];
            }
            for (std::size_t i = 0; i < flat_size; ++i)
                plan[i] += cfg.sgd_lr * ascent[i];
            project_rows(plan, rows, dim);
        }
    }

    if (cfg.enable_veto) {
        const double thresh = ledger.delta_thresh();
        const double c_thresh = ledger.config().veto_capital_threshold;
        const double max_pull = ledger.config().veto_max_pull;
        std::vector<bool> has_vetoed(n_agents, false);
        for (int round = 0; round < cfg.veto_rounds; ++round) {
            // Largest current grievance goes first; each agent at most once.
            std::vector<std::pair<double, std::size_t>> order;
            for (std::size_t j = 0; j < n_agents; ++j) {
                if (has_vetoed[j] || scheme_weights[j] <= 0.0) continue;
                order.emplace_back(out.q[j] - critics[j]->value(plan), j);
            }
            std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
                return a.first > b.first || (a.first == b.first && a.second < b.second);
            });
            bool fired = false;
            for (const auto& [delta0, j] : order) {
                (void)delta0;
                const double delta = out.q[j] - critics[j]->value(plan);
                if (ledger.capital(j) < c_thresh || !(delta > thresh)) continue;
                const double pull = std::min(max_pull, max_pull * delta / thresh);
                for (std::size_t i = 0; i < flat_size; ++i)
                    plan[i] += pull * (proposals[j].plan[i] - plan[i]);
                project_rows(plan, rows, dim);
                has_vetoed[j] = true;
                out.vetoes.push_back({static_cast<int>(j), delta, pull});
                fired = true;
            }
            if (!fired) break;
        }
    }

    out.plan = std::move(plan);
    return out;
}

void update_capitals(CapitalLedger& ledger, std::span<const Proposal> proposals,
                     std::span<const double> blended_plan,
                     const std::array<double, kGoalDim>& blended_achieved,
                     int rows) {
    const std::size_t n_agents = proposals.size();
    for (std::size_t j = 0; j < n_agents; ++j) {
        const int objective = static_cast<int>(j % kGoalDim);
        const double perf = 1.0 - blended_achieved[objective];
        double l1 = 0.0;
        for (std::size_t i = 0; i < blended_plan.size(); ++i)
            l1 += std::abs(proposals[j].plan[i] - blended_plan[i]);
        const double bonus = 1.0 - l1 / (2.0 * static_cast<double>(rows));
        ledger.update(static_cast<int>(j), perf, bonus);
    }
}

}  // namespace marlin
