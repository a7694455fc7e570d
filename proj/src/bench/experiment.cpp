#include "marlin/bench/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "marlin/util/csv.hpp"

namespace marlin {

MarlinRunResult run_baseline(const Environment& env,
                             const std::vector<EpochWorkload>& trace,
                             BaselineKind kind, std::uint64_t seed,
                             const Normalizers& norms) {
    const auto t0 = std::chrono::steady_clock::now();
    MarlinRunResult out;
    out.normalizers = norms;
    BaselineScheduler sched(kind, seed, env, norms);
    EnvState state = env.initial_state();
    out.records.reserve(trace.size());
    for (const auto& workload : trace) {
        const SchedulingPlan plan = sched.plan(state, workload);
        EpochRecord rec;
        rec.epoch = state.epoch;
        rec.plan = {plan.flat().begin(), plan.flat().end()};
        EpochResult res = env.apply_plan(state, workload, plan);
        sched.observe(state, res);
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

std::string run_label(const std::string& base, const AblationFlags& flags) {
    const std::string suffix = to_string(flags);
    return suffix == "full" ? base : base + "+" + suffix;
}

void write_pareto_csv(const std::string& path,
                      const std::vector<ArchivePoint>& archive,
                      const std::string& scheme_label) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "ttft_s,carbon_kg,water_l,cost_usd,epoch,scheme\n";
    for (const auto& p : archive)
        out << fmt_double(p.metrics.ttft_s) << ',' << fmt_double(p.metrics.carbon_kg)
            << ',' << fmt_double(p.metrics.water_l) << ','
            << fmt_double(p.metrics.cost_usd) << ',' << p.epoch << ','
            << scheme_label << '\n';
}

namespace {

RunSummary summarize(const std::string& label, int datacenters,
                     std::uint64_t seed, const MarlinRunResult& run) {
    RunSummary s;
    s.label = label;
    s.datacenters = datacenters;
    s.seed = seed;
    s.archive = run.archive;
    s.wall_seconds = run.wall_seconds;
    double ttft_weight = 0.0;
    for (const auto& rec : run.records) {
        s.totals += rec.result.metrics;
        s.served += rec.result.served;
        s.queued += rec.result.queued;
        s.sla_violations += rec.result.sla_violations;
        for (const auto& dc : rec.result.per_dc) s.energy_kwh += dc.e_it_kwh;
        ttft_weight += rec.result.metrics.ttft_s;
    }
    s.mean_ttft_s =
        s.served > 0 ? ttft_weight / static_cast<double>(s.served) : 0.0;
    return s;
}

void write_epoch_csv_file(const std::string& path, const Scenario& scenario,
                          const MarlinRunResult& run) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << epoch_csv_header() << '\n';
    for (const auto& rec : run.records)
        append_epoch_csv(out, scenario, rec.epoch, rec.result);
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "marlin experiment manifest\n";
    out << "tool_version: 1.0.0\n";
    out << "world: "
        << (cfg.use_default_pool ? "default-pool" : "external-scenario") << '\n';
    out << "datacenter_counts:";
    for (int d : cfg.datacenter_counts) out << ' ' << d;
    out << '\n';
    out << "schemes:";
    for (Scheme s : cfg.schemes) out << ' ' << to_string(s);
    out << '\n';
    out << "baselines:";
    for (BaselineKind k : cfg.baselines) out << ' ' << to_string(k);
    out << '\n';
    out << "ablations:";
    for (const auto& a : cfg.ablations) out << ' ' << to_string(a);
    out << '\n';
    out << "seeds: " << cfg.seeds << '\n';
    out << "trace: "
        << (cfg.external_trace.empty() ? to_string(cfg.trace.pattern) : "external")
        << " epochs " << cfg.trace.epochs << " base "
        << fmt_double(cfg.trace.base_requests) << '\n';
    out << "marlin: k_opt " << cfg.marlin.agent.k_opt << " batch "
        << cfg.marlin.agent.batch_size << " her_k " << cfg.marlin.agent.her_k
        << " sgd_steps " << cfg.marlin.consensus.sgd_steps << " seed_base "
        << cfg.marlin.seed << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.seeds < 1) throw std::invalid_argument("run_experiment: seeds >= 1");
    if (cfg.schemes.empty() && cfg.baselines.empty() && cfg.ablations.empty())
        throw std::invalid_argument("run_experiment: nothing to run");

    const bool write = !cfg.out_dir.empty();
    if (write) std::filesystem::create_directories(cfg.out_dir);

    ExperimentResult result;
    std::vector<int> dc_counts = cfg.datacenter_counts;
    if (!cfg.use_default_pool || dc_counts.empty()) dc_counts = {0};

    for (int dc_count : dc_counts) {
        Scenario scenario;
        if (cfg.use_default_pool && dc_count > 0) {
            const int epochs = cfg.external_trace.empty()
                                   ? cfg.trace.epochs
                                   : static_cast<int>(cfg.external_trace.size());
            scenario = default_scenario(dc_count, epochs);
        } else {
            scenario = cfg.scenario;
        }
        require_valid(scenario);
        const Environment env(scenario);
        const int group_d = static_cast<int>(scenario.datacenters.size());
        const std::size_t group_start = result.runs.size();

        for (int seed = 1; seed <= cfg.seeds; ++seed) {
            std::vector<EpochWorkload> trace = cfg.external_trace;
            if (trace.empty()) {
                TraceConfig tc = cfg.trace;
                tc.num_models = static_cast<int>(scenario.models.size());
                tc.num_regions = static_cast<int>(scenario.regions.size());
                tc.epoch_hours = scenario.epoch_hours;
                trace = synth_trace(tc, static_cast<std::uint64_t>(seed));
            }
            const Normalizers norms = compute_normalizers(env, trace);

            auto emit = [&](const std::string& label, const MarlinRunResult& run) {
                result.runs.push_back(
                    summarize(label, group_d, static_cast<std::uint64_t>(seed), run));
                if (!write) return;
                const std::string stem = cfg.out_dir + "/" + label + "_d" +
                                         std::to_string(group_d) + "_s" +
                                         std::to_string(seed);
                if (cfg.write_epoch_csv)
                    write_epoch_csv_file(stem + "_epochs.csv", scenario, run);
                write_pareto_csv(stem + "_pareto.csv", run.archive, label);
            };

            auto run_scheme = [&](Scheme scheme, const AblationFlags& flags) {
                MarlinConfig mc = cfg.marlin;
                mc.scheme = scheme;
                mc.ablation = flags;
                mc.seed = static_cast<std::uint64_t>(seed);
                const std::string label =
                    run_label(std::string("marlin-") + to_string(scheme), flags);
                emit(label, run_marlin(env, trace, mc));
            };

            for (Scheme scheme : cfg.schemes) run_scheme(scheme, AblationFlags{});
            if (!cfg.ablations.empty()) {
                const Scheme base =
                    cfg.schemes.empty() ? Scheme::balanced : cfg.schemes.front();
                for (const auto& flags : cfg.ablations) {
                    if (to_string(flags) == "full") continue;  // already run
                    run_scheme(base, flags);
                }
            }
            for (BaselineKind kind : cfg.baselines) {
                const MarlinRunResult run = run_baseline(
                    env, trace, kind, static_cast<std::uint64_t>(seed), norms);
                emit(std::string("baseline-") + to_string(kind), run);
            }
        }

        // Score the group against its shared worst-point reference.
        std::vector<MetricsVector> all_points;
        for (std::size_t i = group_start; i < result.runs.size(); ++i)
            for (const auto& p : result.runs[i].archive)
                all_points.push_back(p.metrics);
        if (!all_points.empty()) {
            const MetricsVector ref = worst_point(all_points);
            const MetricsVector unit{1.0, 1.0, 1.0, 1.0};
            for (std::size_t i = group_start; i < result.runs.size(); ++i) {
                std::vector<MetricsVector> pts;
                pts.reserve(result.runs[i].archive.size());
                for (const auto& p : result.runs[i].archive)
                    pts.push_back(p.metrics);
                result.runs[i].phv =
                    pts.empty() ? 0.0
                                : hypervolume(normalize_points(pts, ref), unit);
            }
        }
    }

    if (write) {
        std::ofstream out(cfg.out_dir + "/summary.csv");
        if (!out) throw std::runtime_error("cannot write summary.csv");
        out << "label,datacenters,seed,phv,total_ttft_s,total_carbon_kg,"
               "total_water_l,total_cost_usd,mean_ttft_s,served,queued,"
               "sla_violations,energy_kwh\n";
        for (const auto& r : result.runs)
            out << r.label << ',' << r.datacenters << ',' << r.seed << ','
                << fmt_double(r.phv) << ',' << fmt_double(r.totals.ttft_s) << ','
                << fmt_double(r.totals.carbon_kg) << ','
                << fmt_double(r.totals.water_l) << ','
                << fmt_double(r.totals.cost_usd) << ','
                << fmt_double(r.mean_ttft_s) << ',' << r.served << ',' << r.queued
                << ',' << r.sla_violations << ',' << fmt_double(r.energy_kwh)
                << '\n';
        write_manifest(cfg.out_dir + "/manifest.txt", cfg);
    }
    return result;
}

}  // namespace marlin
