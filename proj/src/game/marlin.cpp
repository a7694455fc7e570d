#include "marlin/game/marlin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace marlin {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::balanced: return "balanced";
        case Scheme::min_latency: return "min-latency";
        case Scheme::min_carbon: return "min-carbon";
        case Scheme::min_water: return "min-water";
        case Scheme::min_cost: return "min-cost";
    }
    return "balanced";
}

Scheme scheme_from_string(const std::string& name) {
    std::string n = name;
    std::replace(n.begin(), n.end(), '_', '-');
    for (Scheme s : kAllSchemes)
        if (n == to_string(s)) return s;
    throw std::invalid_argument("unknown scheme: " + name);
}

ObjectiveWeights scheme_weights(Scheme s) {
    switch (s) {
        case Scheme::balanced: return {};
        case Scheme::min_latency: return ObjectiveWeights::single(0);
        case Scheme::min_carbon: return ObjectiveWeights::single(1);
        case Scheme::min_water: return ObjectiveWeights::single(2);
        case Scheme::min_cost: return ObjectiveWeights::single(3);
    }
    return {};
}

AblationFlags ablation_from_string(const std::string& flags) {
    AblationFlags a;
    std::istringstream in(flags);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        if (tok == "no_veto") a.no_veto = true;
        else if (tok == "no_film") a.no_film = true;
        else if (tok == "no_sgd") a.no_sgd = true;
        else if (tok == "no_dual_buffer") a.no_dual_buffer = true;
        else if (tok == "no_her") a.no_her = true;
        else if (tok == "no_capital") a.no_capital = true;
        else if (tok == "no_phase2") a.no_phase2 = true;
        else throw std::invalid_argument("unknown ablation flag: " + tok);
    }
    return a;
}

std::string to_string(const AblationFlags& a) {
    std::string out;
    auto add = [&out](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ',';
        out += name;
    };
    add(a.no_veto, "no_veto");
    add(a.no_film, "no_film");
    add(a.no_sgd, "no_sgd");
    add(a.no_dual_buffer, "no_dual_buffer");
    add(a.no_her, "no_her");
    add(a.no_capital, "no_capital");
    add(a.no_phase2, "no_phase2");
    return out.empty() ? "full" : out;
}

bool archive_insert(std::vector<ArchivePoint>& archive, const ArchivePoint& p) {
    for (const auto& q : archive)
        if (dominates(q.metrics, p.metrics) || q.metrics.as_array() == p.metrics.as_array())
            return false;
    std::erase_if(archive, [&p](const ArchivePoint& q) {
        return dominates(p.metrics, q.metrics);
    });
    archive.push_back(p);
    return true;
}

Normalizers compute_normalizers(const Environment& env,
                                const std::vector<EpochWorkload>& trace) {
    const auto& s = env.scenario();
    const auto uniform = SchedulingPlan::uniform(
        static_cast<int>(s.models.size()), static_cast<int>(s.regions.size()),
        static_cast<int>(s.datacenters.size()));
    Normalizers n;
    n.ref = {0.0, 0.0, 0.0, 0.0};
    EnvState state = env.initial_state();
    for (const auto& w : trace) {
        const EpochResult res = env.apply_plan(state, w, uniform);
        for (int j = 0; j < kNumObjectives; ++j)
            n.ref[j] = std::max(n.ref[j], res.metrics[j]);
    }
    for (double& r : n.ref)
        if (!(r > 0.0)) r = 1.0;
    return n;
}

namespace {

// Aggregates one epoch's observations into per-(model, region) counts and
// refreshes the trailing token averages used for predicted entries.
void observe_epoch(const EpochWorkload& w, int num_regions,
                   std::vector<double>& counts, std::vector<double>& last_in,
                   std::vector<double>& last_out) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& e : w.entries) {
        const std::size_t i =
            static_cast<std::size_t>(e.model) * num_regions + e.region;
        counts[i] += static_cast<double>(e.request_count);
        if (e.request_count > 0) {
            last_in[i] = e.avg_input_tokens;
            last_out[i] = e.avg_output_tokens;
        }
    }
}

}  // namespace

MarlinRunResult run_marlin(const Environment& env,
                           const std::vector<EpochWorkload>& trace,
                           const MarlinConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& s = env.scenario();
    const int num_models = static_cast<int>(s.models.size());
    const int num_regions = static_cast<int>(s.regions.size());
    const int num_dcs = static_cast<int>(s.datacenters.size());
    const int rows = num_models * num_regions;
    const std::size_t series = static_cast<std::size_t>(rows);

    MarlinRunResult out;
    out.normalizers = compute_normalizers(env, trace);

    // Context scale: the largest series count seen anywhere in the trace.
    std::vector<double> series_scale(series, 1.0);
    for (const auto& w : trace)
        for (const auto& e : w.entries) {
            const std::size_t i =
                static_cast<std::size_t>(e.model) * num_regions + e.region;
            series_scale[i] =
                std::max(series_scale[i], static_cast<double>(e.request_count));
        }

    PlanActionMap action_map(rows, num_dcs);

    AgentConfig acfg = cfg.agent;
    acfg.sac.state_dim = env.state_dim();
    acfg.sac.action_dim = rows * num_dcs;
    acfg.sac.context_dim = env.state_dim() + rows + 2;
    acfg.sac.use_film = acfg.sac.use_film && !cfg.ablation.no_film;
    acfg.use_dual_buffer = acfg.use_dual_buffer && !cfg.ablation.no_dual_buffer;
    acfg.use_her = acfg.use_her && !cfg.ablation.no_her;

    std::vector<MarlinAgent> agents;
    agents.reserve(kNumObjectives);
    for (int j = 0; j < kNumObjectives; ++j) {
        acfg.objective = j;
        Rng init = Rng::stream(cfg.seed, 1000 + static_cast<std::uint64_t>(j));
        agents.emplace_back(acfg, &action_map, init);
    }

    CapitalConfig capital = cfg.capital;
    if (cfg.ablation.no_capital) capital.veto_capital_threshold = capital.c_min;
    CapitalLedger ledger(kNumObjectives, capital);

    ConsensusConfig consensus = cfg.consensus;
    consensus.enable_sgd = consensus.enable_sgd && !cfg.ablation.no_sgd;
    consensus.enable_veto = consensus.enable_veto && !cfg.ablation.no_veto;

    const ObjectiveWeights sw = scheme_weights(cfg.scheme);

    ForecastBank bank(num_models, num_regions, cfg.forecast_alpha,
                      cfg.forecast_window);
    std::vector<double> last_in(series, 0.0), last_out(series, 0.0);
    std::vector<double> observed(series, 0.0);
    const double epochs_per_day = std::max(1.0, 24.0 / s.epoch_hours);

    EnvState state = env.initial_state();
    out.records.reserve(trace.size());

    for (std::size_t e = 0; e < trace.size(); ++e) {
        const EpochWorkload& actual = trace[e];
        if (actual.epoch_index != state.epoch)
            throw std::invalid_argument("trace epochs must be dense from 0");

        const std::vector<double> forecast = bank.predict_all();
        state.forecast = forecast;

        EpochWorkload predicted;
        predicted.epoch_index = state.epoch;
        for (int m = 0; m < num_models; ++m)
            for (int r = 0; r < num_regions; ++r) {
                const std::size_t i =
                    static_cast<std::size_t>(m) * num_regions + r;
                const long long c = std::llround(forecast[i]);
                if (c > 0)
                    predicted.entries.push_back(
                        {m, r, c, last_out[i], last_in[i]});
            }

        const auto features = env.state_features(state);
        std::vector<double> context = features;
        context.reserve(features.size() + series + 2);
        for (std::size_t i = 0; i < series; ++i)
            context.push_back(forecast[i] / series_scale[i]);
        const double phase =
            6.283185307179586 * static_cast<double>(state.epoch) / epochs_per_day;
        context.push_back(std::sin(phase));
        context.push_back(std::cos(phase));

        auto proposals = phase1_train_epoch(agents, env, state, predicted,
                                            context, out.normalizers, cfg.seed,
                                            state.epoch);

        EpochRecord rec;
        rec.epoch = state.epoch;
        for (const auto& p : proposals) rec.proposal_rewards.push_back(p.reward);

        std::vector<double> chosen;
        if (cfg.ablation.no_phase2) {
            // Game off: take the single proposal best under the scheme's
            // weighted objective.
            std::size_t best = 0;
            double best_obj = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < proposals.size(); ++j) {
                const double obj =
                    weighted_objective(proposals[j].metrics, sw, out.normalizers);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = j;
                }
            }
            chosen = proposals[best].plan;
        } else {
            std::vector<AgentCriticView> views;
            views.reserve(agents.size());
            for (auto& a : agents) views.emplace_back(a.sac(), features);
            std::vector<CriticView*> critics;
            for (auto& v : views) critics.push_back(&v);

            const ConsensusResult cr =
                consensus_blend(proposals, critics, sw.w, ledger, rows, num_dcs,
                                consensus);
            chosen = cr.plan;
            rec.blend_weights = cr.blend_weights;
            rec.vetoes = cr.vetoes;

            if (!cfg.ablation.no_capital) {
                // Settle capital on the planning workload the game played on.
                const auto blended = SchedulingPlan::from_routing(
                    num_models, num_regions, num_dcs, chosen);
                const EpochResult planned =
                    env.evaluate_plan(state, predicted, blended);
                update_capitals(
                    ledger, proposals, chosen,
                    normalized_metrics(planned.metrics, out.normalizers), rows);
            }
        }

        const auto plan = SchedulingPlan::from_routing(num_models, num_regions,
                                                       num_dcs, chosen);
        EpochResult res = env.apply_plan(state, actual, plan);

        observe_epoch(actual, num_regions, observed, last_in, last_out);
        bank.update_all(observed);

        rec.plan = std::move(chosen);
        rec.capitals.assign(ledger.capitals().begin(), ledger.capitals().end());
        if (res.served > 0) {
            const double inv = 1.0 / static_cast<double>(res.served);
            rec.per_request = {res.metrics.ttft_s * inv,
                               res.metrics.carbon_kg * inv,
                               res.metrics.water_l * inv,
                               res.metrics.cost_usd * inv};
            archive_insert(out.archive, {rec.per_request, rec.epoch});
        }
        rec.result = std::move(res);
        rec.result.allocation = {};
        out.records.push_back(std::move(rec));
    }

    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

}  // namespace marlin
