#include "marlin/neural/sac.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace marlin {

namespace {

const ActionMap kIdentityMap;

// Smooth bound for the log standard deviation: keeps gradients alive at the
// edges, unlike a hard clamp. The floor (sigma >= e^-2.5) keeps a trickle of
// exploration even after the temperature anneals away, so the critics keep
// receiving data around the policy mean instead of freezing on a snapshot.
constexpr double kLogStdMid = -0.25;
constexpr double kLogStdHalf = 2.25;

double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

// log(1 - tanh(x)^2), numerically stable for large |x|.
double log_one_minus_tanh_sq(double x) {
    return 2.0 * (std::numbers::ln2 - x - softplus(-2.0 * x));
}

void check_finite(double v, const char* component) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("sac_update: non-finite ") + component);
}

}  // namespace

SacAgent::SacAgent(const SacConfig& cfg, Rng& init_rng) : cfg_(cfg) {
    if (cfg.state_dim <= 0 || cfg.action_dim <= 0)
        throw std::invalid_argument("SacAgent: dimensions must be positive");
    actor_ = Mlp({cfg.obs_dim(), cfg.actor_hidden, 2 * cfg.action_dim}, init_rng);
    if (cfg.use_film)
        film_ = FilmGenerator(cfg.context_dim, {cfg.actor_hidden}, cfg.film_hidden,
                              init_rng);
    critic1_ = Mlp({cfg.obs_dim() + cfg.action_dim, cfg.critic_hidden, 1}, init_rng);
    critic2_ = Mlp({cfg.obs_dim() + cfg.action_dim, cfg.critic_hidden, 1}, init_rng);
    target1_ = critic1_;
    target2_ = critic2_;
    log_alpha_ = std::log(cfg.init_alpha);
    adam_actor_ = Adam(actor_.params().size(), cfg.actor_lr);
    if (cfg.use_film) adam_film_ = Adam(film_.net().params().size(), cfg.actor_lr);
    adam_c1_ = Adam(critic1_.params().size(), cfg.critic_lr);
    adam_c2_ = Adam(critic2_.params().size(), cfg.critic_lr);
}

const ActionMap& SacAgent::action_map() const {
    return action_map_ ? *action_map_ : kIdentityMap;
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

std::vector<double> SacAgent::make_obs(
    std::span<const double> state, const std::array<double, kGoalDim>& goal) const {
    if (static_cast<int>(state.size()) != cfg_.state_dim)
        throw std::invalid_argument("SacAgent: state dimension mismatch");
    std::vector<double> obs(state.begin(), state.end());
    obs.insert(obs.end(), goal.begin(), goal.end());
    return obs;
}

ActorSample SacAgent::sample_action(std::span<const double> state,
                                    const std::array<double, kGoalDim>& goal,
                                    std::span<const double> context, Rng& rng,
                                    bool deterministic) const {
    const int a_dim = cfg_.action_dim;
    ActorSample s;
    s.deterministic = deterministic;

    const auto obs = make_obs(state, goal);
    FilmSignal film;
    if (cfg_.use_film) {
        film = film_.generate(context, &s.film_cache);
        s.modulated = true;
    }
    const auto out = actor_.forward(obs, &s.actor_cache,
                                    s.modulated ? &film : nullptr);

    s.mu.assign(out.begin(), out.begin() + a_dim);
    s.log_std.resize(a_dim);
    s.sigma.resize(a_dim);
    s.eps.resize(a_dim);
    s.pre.resize(a_dim);
    s.squashed.resize(a_dim);
    s.log_prob = 0.0;
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (int i = 0; i < a_dim; ++i) {
        const double raw = out[a_dim + i];
        s.log_std[i] = kLogStdMid + kLogStdHalf * std::tanh(raw);
        s.sigma[i] = std::exp(s.log_std[i]);
        s.eps[i] = deterministic ? 0.0 : rng.normal();
        s.pre[i] = s.mu[i] + s.sigma[i] * s.eps[i];
        s.squashed[i] = std::tanh(s.pre[i]);
        s.log_prob += -0.5 * s.eps[i] * s.eps[i] - s.log_std[i] - half_log_2pi -
                      log_one_minus_tanh_sq(s.pre[i]);
    }
    return s;
}

void SacAgent::actor_backward(const ActorSample& sample,
                              std::span<const double> d_squashed,
                              double d_log_prob) {
    const int a_dim = cfg_.action_dim;
    std::vector<double> dy(static_cast<std::size_t>(2) * a_dim, 0.0);
    for (int i = 0; i < a_dim; ++i) {
        const double a = sample.squashed[i];
        // Through pre = mu + sigma*eps: the action path and the squash
        // correction inside log pi both depend on pre.
        const double d_pre = d_squashed[i] * (1.0 - a * a) + d_log_prob * 2.0 * a;
        const double d_log_std =
            d_pre * sample.sigma[i] * sample.eps[i] - d_log_prob;
        const double t = (sample.log_std[i] - kLogStdMid) / kLogStdHalf;
        dy[i] = d_pre;                                       // d/d mu
        dy[a_dim + i] = d_log_std * kLogStdHalf * (1.0 - t * t);  // d/d raw
    }
    FilmSignal film_grads;
    actor_.backward(sample.actor_cache, dy,
                    sample.modulated ? &film_grads : nullptr);
    if (sample.modulated) film_.backward(sample.film_cache, film_grads);
}

double SacAgent::critic_value(std::span<const double> state,
                              const std::array<double, kGoalDim>& goal,
                              std::span<const double> action,
                              std::vector<double>* grad_action) {
    auto obs = make_obs(state, goal);
    obs.insert(obs.end(), action.begin(), action.end());
    Mlp::Cache c1, c2;
    const double q1 = critic1_.forward(obs, &c1)[0];
    const double q2 = critic2_.forward(obs, &c2)[0];
    const bool first = q1 <= q2;
    if (grad_action) {
        const std::vector<double> dy{1.0};
        auto dx = first ? critic1_.backward(c1, dy, nullptr, false)
                        : critic2_.backward(c2, dy, nullptr, false);
        grad_action->assign(dx.begin() + cfg_.obs_dim(), dx.end());
    }
    return first ? q1 : q2;
}

SacLosses SacAgent::update(const std::vector<const Transition*>& batch, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("sac_update: empty batch");
    const int a_dim = cfg_.action_dim;
    const double inv_n = 1.0 / batch.size();
    const ActionMap& map = action_map();
    SacLosses losses;
    losses.alpha = alpha();

    // --- Twin-critic regression. Terminal transitions target the immediate
    // reward; continuing ones bootstrap through the target critics at a fresh
    // policy action, with the successor state equal to the state (self-loop).
    std::vector<double> targets(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& t = *batch[b];
        if (t.terminal) {
            targets[b] = t.reward;
        } else {
            const auto next = sample_action(t.state, t.goal, t.context, rng);
            const auto plan = map.apply(next.squashed);
            auto obs = make_obs(t.state, t.goal);
            obs.insert(obs.end(), plan.begin(), plan.end());
            const double tq1 = target1_.forward(obs)[0];
            const double tq2 = target2_.forward(obs)[0];
            const double soft_q = std::min(tq1, tq2) - losses.alpha * next.log_prob;
            targets[b] = t.reward + cfg_.gamma * soft_q;
        }
        check_finite(targets[b], "bootstrap target");
    }

    critic1_.zero_grads();
    critic2_.zero_grads();
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& t = *batch[b];
        auto obs = make_obs(t.state, t.goal);
        obs.insert(obs.end(), t.action.begin(), t.action.end());
        Mlp::Cache c1, c2;
        const double q1 = critic1_.forward(obs, &c1)[0];
        const double q2 = critic2_.forward(obs, &c2)[0];
        const double e1 = q1 - targets[b];
        const double e2 = q2 - targets[b];
        losses.critic_loss += 0.5 * (e1 * e1 + e2 * e2) * inv_n;
        losses.mean_q += 0.5 * (q1 + q2) * inv_n;
        const std::vector<double> d1{2.0 * e1 * inv_n};
        const std::vector<double> d2{2.0 * e2 * inv_n};
        critic1_.backward(c1, d1);
        critic2_.backward(c2, d2);
    }
    check_finite(losses.critic_loss, "critic loss");
    adam_c1_.step(critic1_.params(), critic1_.grads());
    adam_c2_.step(critic2_.params(), critic2_.grads());

    // --- Reparameterized actor step through the frozen critics.
    actor_.zero_grads();
    if (cfg_.use_film) film_.net().zero_grads();
    double mean_log_prob = 0.0;
    for (const Transition* tp : batch) {
        const Transition& t = *tp;
        const auto fresh = sample_action(t.state, t.goal, t.context, rng);
        const auto plan = map.apply(fresh.squashed);
        auto obs = make_obs(t.state, t.goal);
        obs.insert(obs.end(), plan.begin(), plan.end());
        Mlp::Cache c1, c2;
        const double q1 = critic1_.forward(obs, &c1)[0];
        const double q2 = critic2_.forward(obs, &c2)[0];
        const double q = std::min(q1, q2);
        losses.actor_loss += (losses.alpha * fresh.log_prob - q) * inv_n;
        mean_log_prob += fresh.log_prob * inv_n;

        // dL/dplan through the minimizing twin, then back through the
        // feasibility map and the squash.
        const std::vector<double> dq{-inv_n};
        auto dx = q1 <= q2 ? critic1_.backward(c1, dq, nullptr, false)
                           : critic2_.backward(c2, dq, nullptr, false);
        std::span<const double> d_plan(dx.data() + cfg_.obs_dim(),
                                       static_cast<std::size_t>(a_dim));
        const auto d_squashed = map.backward(fresh.squashed, plan, d_plan);
        actor_backward(fresh, d_squashed, losses.alpha * inv_n);
    }
    check_finite(losses.actor_loss, "actor loss");
    adam_actor_.step(actor_.params(), actor_.grads());
    if (cfg_.use_film) adam_film_.step(film_.net().params(), film_.net().grads());

    // --- Temperature step toward the entropy target.
    const double excess = mean_log_prob + cfg_.target_entropy();
    losses.alpha_loss = -log_alpha_ * excess;
    check_finite(losses.alpha_loss, "temperature loss");
    log_alpha_ -= cfg_.alpha_lr * (-excess);
    losses.alpha = alpha();

    // --- Soft target update.
    for (int k = 0; k < 2; ++k) {
        Mlp& online = k == 0 ? critic1_ : critic2_;
        Mlp& target = k == 0 ? target1_ : target2_;
        auto& tp = target.params();
        const auto& op = online.params();
        for (std::size_t i = 0; i < tp.size(); ++i)
            tp[i] = (1.0 - cfg_.tau) * tp[i] + cfg_.tau * op[i];
    }
    return losses;
}

}  // namespace marlin
