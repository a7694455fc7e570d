#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "marlin/bench/baselines.hpp"
#include "marlin/bench/experiment.hpp"
#include "marlin/bench/pareto.hpp"
#include "marlin/bench/scenarios.hpp"
#include "marlin/bench/trace.hpp"
#include "marlin/core/scenario.hpp"
#include "marlin/util/rng.hpp"

using namespace marlin;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir =
        std::filesystem::temp_directory_path() / ("marlin_bench_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Monte-Carlo estimate of the dominated volume: fraction of uniform samples
// in the reference box that some front point weakly dominates.
double mc_hypervolume(const std::vector<MetricsVector>& pts,
                      const MetricsVector& ref, int samples, Rng& rng) {
    long long hits = 0;
    for (int s = 0; s < samples; ++s) {
        std::array<double, 4> x;
        for (int j = 0; j < 4; ++j) x[static_cast<std::size_t>(j)] = rng.uniform() * ref[j];
        for (const auto& p : pts) {
            bool dom = true;
            for (int j = 0; j < 4; ++j)
                if (p[j] > x[static_cast<std::size_t>(j)]) {
                    dom = false;
                    break;
                }
            if (dom) {
                ++hits;
                break;
            }
        }
    }
    double box = 1.0;
    for (int j = 0; j < 4; ++j) box *= ref[j];
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

// n mutually non-dominated points: equal-L1 vectors differ in both directions
// somewhere, so none can dominate another.
std::vector<MetricsVector> constant_sum_front(int n, Rng& rng, double scale) {
    std::vector<MetricsVector> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto d = rng.dirichlet_flat(4);
        pts.push_back(MetricsVector::from_array(
            {scale * d[0], scale * d[1], scale * d[2], scale * d[3]}));
    }
    return pts;
}

}  // namespace

TEST_CASE("hypervolume: closed-form single- and two-point volumes") {
    const MetricsVector unit{1.0, 1.0, 1.0, 1.0};
    // One point: the box from the point to the reference.
    const std::vector<MetricsVector> one{{0.4, 0.4, 0.3, 0.5}};
    CHECK(hypervolume(one, unit) == doctest::Approx(0.126).epsilon(1e-12));

    // Two overlapping boxes: inclusion-exclusion by hand gives
    // 0.08 + 0.08 - 0.04.
    const std::vector<MetricsVector> two{{0.2, 0.6, 0.5, 0.5},
                                         {0.6, 0.2, 0.5, 0.5}};
    CHECK(hypervolume(two, unit) == doctest::Approx(0.12).epsilon(1e-12));

    CHECK(hypervolume(std::vector<MetricsVector>{}, unit) == 0.0);

    // A dominated duplicate changes nothing.
    std::vector<MetricsVector> padded = two;
    padded.push_back({0.7, 0.7, 0.9, 0.9});
    CHECK(hypervolume(padded, unit) == doctest::Approx(0.12).epsilon(1e-12));

    const std::vector<MetricsVector> outside{{1.2, 0.5, 0.5, 0.5}};
    CHECK_THROWS_AS(hypervolume(outside, unit), std::invalid_argument);
}

TEST_CASE("hypervolume: agrees with a Monte-Carlo oracle on both code paths") {
    const MetricsVector unit{1.0, 1.0, 1.0, 1.0};
    Rng gen(2024);

    // Small front: the subset inclusion-exclusion branch.
    const auto small = constant_sum_front(8, gen, 0.9);
    const double hv_small = hypervolume(small, unit);
    Rng mc1(5150);
    const double est_small = mc_hypervolume(small, unit, 1'500'000, mc1);
    CHECK(hv_small == doctest::Approx(est_small).epsilon(0.01));

    // Large front: the recursive objective-slicing branch (> 20 points).
    const auto large = constant_sum_front(25, gen, 0.9);
    const double hv_large = hypervolume(large, unit);
    Rng mc2(5151);
    const double est_large = mc_hypervolume(large, unit, 1'500'000, mc2);
    CHECK(hv_large == doctest::Approx(est_large).epsilon(0.01));

    CHECK(hv_small > 0.0);
    CHECK(hv_large > 0.0);
    CHECK(hv_small <= 1.0);
    CHECK(hv_large <= 1.0);
}

TEST_CASE("hypervolume: inserting points never shrinks the volume") {
    const MetricsVector unit{1.0, 1.0, 1.0, 1.0};
    Rng gen(77);
    ParetoFront front;
    double prev = 0.0;
    for (int i = 0; i < 30; ++i) {
        const auto d = gen.dirichlet_flat(4);
        front.insert(MetricsVector::from_array(
            {0.95 * d[0], 0.95 * d[1], 0.95 * d[2], 0.95 * d[3]}));
        const double hv = hypervolume(front, unit);
        CHECK(hv >= prev - 1e-12);
        prev = hv;
    }
}

TEST_CASE("pareto front matches an order-free quadratic-scan oracle") {
    Rng gen(31337);
    std::vector<MetricsVector> cloud;
    for (int i = 0; i < 100; ++i)
        cloud.push_back({gen.uniform(0.0, 1.0), gen.uniform(0.0, 1.0),
                         gen.uniform(0.0, 1.0), gen.uniform(0.0, 1.0)});

    ParetoFront front;
    for (const auto& m : cloud) front.insert(m);

    std::vector<std::array<double, 4>> expected;
    for (const auto& a : cloud) {
        bool dominated = false;
        for (const auto& b : cloud)
            if (dominates(b, a)) {
                dominated = true;
                break;
            }
        if (!dominated) expected.push_back(a.as_array());
    }
    std::vector<std::array<double, 4>> got;
    for (const auto& m : front.points()) got.push_back(m.as_array());
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
}

TEST_CASE("worst point and normalization square the archive into the unit box") {
    const std::vector<MetricsVector> pts{{1.0, 8.0, 3.0, 2.0},
                                         {4.0, 2.0, 6.0, 1.0}};
    const MetricsVector w = worst_point(pts);
    CHECK(w.as_array() == std::array<double, 4>{4.0, 8.0, 6.0, 2.0});

    const auto norm = normalize_points(pts, w);
    REQUIRE(norm.size() == 2);
    CHECK(norm[0].as_array() ==
          std::array<double, 4>{0.25, 1.0, 0.5, 1.0});
    CHECK(norm[1].as_array() == std::array<double, 4>{1.0, 0.25, 1.0, 0.5});
    // Normalized points sit inside the unit reference by construction.
    CHECK_NOTHROW(hypervolume(norm, MetricsVector{1.0, 1.0, 1.0, 1.0}));

    const MetricsVector degenerate{1.0, 0.0, 1.0, 1.0};
    CHECK_THROWS_AS(normalize_points(pts, degenerate), std::invalid_argument);
}

TEST_CASE("step trace is exact; the level doubles at the step epoch") {
    TraceConfig tc;
    tc.pattern = TracePattern::step;
    tc.epochs = 60;
    tc.num_models = 2;
    tc.num_regions = 3;
    tc.base_requests = 100.0;
    tc.step_epoch = 50;
    tc.step_factor = 2.0;
    const auto trace = synth_trace(tc, 1);
    REQUIRE(trace.size() == 60);
    for (const auto& wl : trace) {
        REQUIRE(wl.entries.size() == 2u * 3u);
        for (const auto& e : wl.entries) {
            const double share = e.model == 0 ? 0.7 : 0.3;
            const double level = wl.epoch_index >= 50 ? 2.0 : 1.0;
            CHECK(e.request_count ==
                  std::llround(100.0 * share * level));
            CHECK(e.avg_input_tokens == trace_avg_input_tokens(e.model));
            CHECK(e.avg_output_tokens == trace_avg_output_tokens(e.model));
        }
    }
    // Identical seeds reproduce the trace; the pattern itself is noise-free.
    const auto again = synth_trace(tc, 99);
    for (std::size_t i = 0; i < trace.size(); ++i)
        for (std::size_t j = 0; j < trace[i].entries.size(); ++j)
            CHECK(again[i].entries[j].request_count ==
                  trace[i].entries[j].request_count);
}

TEST_CASE("constant trace fluctuates around the configured level") {
    TraceConfig tc;
    tc.pattern = TracePattern::constant;
    tc.epochs = 96;
    tc.num_models = 2;
    tc.num_regions = 4;
    tc.base_requests = 1000.0;
    const auto trace = synth_trace(tc, 7);
    double sum0 = 0.0, sum1 = 0.0;
    long long n0 = 0, n1 = 0;
    for (const auto& wl : trace)
        for (const auto& e : wl.entries) {
            CHECK(e.request_count >= 0);
            if (e.model == 0) {
                sum0 += static_cast<double>(e.request_count);
                ++n0;
            } else {
                sum1 += static_cast<double>(e.request_count);
                ++n1;
            }
        }
    // Poisson noise around 700 / 300 per series-epoch: 5% is > 10 sigma.
    CHECK(sum0 / static_cast<double>(n0) == doctest::Approx(700.0).epsilon(0.05));
    CHECK(sum1 / static_cast<double>(n1) == doctest::Approx(300.0).epsilon(0.05));
}

TEST_CASE("diurnal expectation: full-day mean preserved, regions phase-shifted") {
    TraceConfig tc;  // defaults: diurnal, 96 x 0.25h = exactly one day
    double mean_r0 = 0.0;
    for (int e = 0; e < tc.epochs; ++e) mean_r0 += trace_mean(tc, 0, 0, e);
    mean_r0 /= tc.epochs;
    // The sinusoid averages out over a whole day of uniform samples.
    CHECK(mean_r0 == doctest::Approx(700.0).epsilon(1e-9));

    // Different regions peak at different epochs.
    auto argmax_epoch = [&](int region) {
        int arg = 0;
        double top = trace_mean(tc, 0, region, 0);
        for (int e = 1; e < tc.epochs; ++e) {
            const double v = trace_mean(tc, 0, region, e);
            if (v > top) {
                top = v;
                arg = e;
            }
        }
        return arg;
    };
    CHECK(argmax_epoch(0) != argmax_epoch(2));

    // Amplitude actually moves the expectation.
    double lo = 1e18, hi = -1e18;
    for (int e = 0; e < tc.epochs; ++e) {
        const double v = trace_mean(tc, 0, 0, e);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo > 0.5 * tc.diurnal_amplitude * 700.0);
}

TEST_CASE("bursty trace produces rare heavy spikes over a long horizon") {
    TraceConfig tc;
    tc.pattern = TracePattern::bursty;
    tc.epochs = 1344;  // two weeks of 15-minute epochs
    tc.num_models = 1;
    tc.num_regions = 1;
    tc.model_mix = 1.0;
    tc.base_requests = 100.0;
    const auto trace = synth_trace(tc, 11);
    std::vector<long long> counts;
    counts.reserve(trace.size());
    for (const auto& wl : trace) {
        REQUIRE(wl.entries.size() == 1);
        counts.push_back(wl.entries[0].request_count);
    }
    std::vector<long long> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    const double median = static_cast<double>(sorted[sorted.size() / 2]);
    const double peak = static_cast<double>(sorted.back());
    CHECK(median > 0.0);
    CHECK(peak / median >= 5.0);  // spikes dwarf the routine level
}

TEST_CASE("trace csv round trip preserves every entry") {
    const Scenario s = default_scenario(3, 8);
    TraceConfig tc;
    tc.pattern = TracePattern::diurnal;
    tc.epochs = 8;
    tc.num_models = static_cast<int>(s.models.size());
    tc.num_regions = static_cast<int>(s.regions.size());
    tc.base_requests = 50.0;
    const auto trace = synth_trace(tc, 3);

    const auto dir = temp_dir("trace");
    const auto path = (dir / "trace.csv").string();
    save_trace_csv(path, trace, s);
    const auto loaded = load_trace_csv(path, s);

    REQUIRE(loaded.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        REQUIRE(loaded[i].entries.size() == trace[i].entries.size());
        CHECK(loaded[i].epoch_index == trace[i].epoch_index);
        for (std::size_t j = 0; j < trace[i].entries.size(); ++j) {
            const auto& a = trace[i].entries[j];
            const auto& b = loaded[i].entries[j];
            CHECK(a.model == b.model);
            CHECK(a.region == b.region);
            CHECK(a.request_count == b.request_count);
            CHECK(a.avg_input_tokens == b.avg_input_tokens);
            CHECK(a.avg_output_tokens == b.avg_output_tokens);
        }
    }
    std::filesystem::remove_all(dir);

    CHECK_THROWS(load_trace_csv((dir / "missing.csv").string(), s));
}

TEST_CASE("trace pattern names round trip") {
    for (TracePattern p : {TracePattern::diurnal, TracePattern::bursty,
                           TracePattern::constant, TracePattern::step})
        CHECK(trace_pattern_from_string(to_string(p)) == p);
    CHECK_THROWS(trace_pattern_from_string("sawtooth"));
}

TEST_CASE("each greedy baseline finds the datacenter built to win its metric") {
    struct Case {
        BaselineKind kind;
        int objective;
    };
    const Case cases[] = {{BaselineKind::greedy_latency, 0},
                          {BaselineKind::greedy_carbon, 1},
                          {BaselineKind::greedy_water, 2},
                          {BaselineKind::greedy_cost, 3}};
    for (const auto& c : cases) {
        CAPTURE(c.objective);
        const Scenario s = contrast_scenario(c.objective, 8);
        const Environment env(s);
        const EnvState state = env.initial_state();
        EpochWorkload wl;
        wl.epoch_index = 0;
        wl.entries.push_back({0, 0, 40, 128.0, 64.0});
        BaselineScheduler sched(c.kind, 1, env, Normalizers{});
        const auto plan = sched.plan(state, wl);
        for (int m = 0; m < plan.models(); ++m)
            for (int r = 0; r < plan.regions(); ++r)
                CHECK(plan.at(m, r, 0) == 1.0);
    }
}

TEST_CASE("round-robin splits uniformly; random plans are seeded and valid") {
    const Scenario s = default_scenario(4, 8);
    const Environment env(s);
    const EnvState state = env.initial_state();
    EpochWorkload wl;
    wl.epoch_index = 0;
    wl.entries.push_back({0, 0, 10, 128.0, 64.0});

    BaselineScheduler rr(BaselineKind::round_robin, 1, env, Normalizers{});
    const auto uniform = rr.plan(state, wl);
    for (int m = 0; m < uniform.models(); ++m)
        for (int r = 0; r < uniform.regions(); ++r)
            for (int d = 0; d < uniform.dcs(); ++d)
                CHECK(uniform.at(m, r, d) == doctest::Approx(0.25).epsilon(1e-12));

    BaselineScheduler ra(BaselineKind::random_plan, 9, env, Normalizers{});
    BaselineScheduler rb(BaselineKind::random_plan, 9, env, Normalizers{});
    const auto pa = ra.plan(state, wl);
    const auto pb = rb.plan(state, wl);
    CHECK(pa.simplex_valid());
    for (int m = 0; m < pa.models(); ++m)
        for (int r = 0; r < pa.regions(); ++r)
            for (int d = 0; d < pa.dcs(); ++d)
                CHECK(pa.at(m, r, d) == pb.at(m, r, d));
    // A different seed diverges.
    BaselineScheduler rc(BaselineKind::random_plan, 10, env, Normalizers{});
    const auto pc = rc.plan(state, wl);
    bool any_diff = false;
    for (int d = 0; d < pc.dcs(); ++d)
        if (pc.at(0, 0, d) != pa.at(0, 0, d)) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("tabular-q baseline learns from observations without breaking plans") {
    const Scenario s = default_scenario(2, 16);
    const Environment env(s);
    TraceConfig tc;
    tc.pattern = TracePattern::constant;
    tc.epochs = 16;
    tc.num_models = static_cast<int>(s.models.size());
    tc.num_regions = static_cast<int>(s.regions.size());
    tc.base_requests = 30.0;
    const auto trace = synth_trace(tc, 2);
    const Normalizers norms = compute_normalizers(env, trace);

    BaselineScheduler q(BaselineKind::tabular_q, 4, env, norms);
    EnvState state = env.initial_state();
    for (const auto& wl : trace) {
        const auto plan = q.plan(state, wl);
        CHECK(plan.simplex_valid());
        // Pure per-model choices: every row is a one-hot vector.
        for (int m = 0; m < plan.models(); ++m)
            for (int r = 0; r < plan.regions(); ++r) {
                int ones = 0;
                for (int d = 0; d < plan.dcs(); ++d) {
                    if (plan.at(m, r, d) == 1.0) ++ones;
                    else CHECK(plan.at(m, r, d) == 0.0);
                }
                CHECK(ones == 1);
            }
        const auto res = env.apply_plan(state, wl, plan);
        q.observe(state, res);
    }
}

TEST_CASE("baseline names parse, including the expand-all shorthand") {
    for (BaselineKind k : kAllBaselines)
        CHECK(baseline_from_string(to_string(k)) == k);
    CHECK_THROWS(baseline_from_string("fifo"));
    CHECK(parse_baseline_list("all").size() == std::size(kAllBaselines));
    CHECK(parse_baseline_list("").size() == std::size(kAllBaselines));
    const auto two = parse_baseline_list("round_robin,greedy_cost");
    REQUIRE(two.size() == 2);
    CHECK(two[0] == BaselineKind::round_robin);
    CHECK(two[1] == BaselineKind::greedy_cost);
}

TEST_CASE("baseline runs fill the same record and archive shapes as the learner") {
    const Scenario s = default_scenario(2, 8);
    const Environment env(s);
    TraceConfig tc;
    tc.pattern = TracePattern::constant;
    tc.epochs = 8;
    tc.num_models = static_cast<int>(s.models.size());
    tc.num_regions = static_cast<int>(s.regions.size());
    tc.base_requests = 30.0;
    const auto trace = synth_trace(tc, 5);
    const Normalizers norms = compute_normalizers(env, trace);

    const auto run =
        run_baseline(env, trace, BaselineKind::round_robin, 1, norms);
    REQUIRE(run.records.size() == trace.size());
    for (const auto& rec : run.records) {
        CHECK(rec.result.metrics.finite());
        CHECK(rec.result.served >= 0);
    }
    CHECK_FALSE(run.archive.empty());
}

TEST_CASE("run labels append the ablation suffix only when one is active") {
    CHECK(run_label("marlin-balanced", AblationFlags{}) == "marlin-balanced");
    AblationFlags f;
    f.no_veto = true;
    CHECK(run_label("marlin-balanced", f) == "marlin-balanced+no_veto");
}

TEST_CASE("experiment harness: files exist and rerunning is byte-identical") {
    ExperimentConfig cfg;
    cfg.use_default_pool = true;
    cfg.datacenter_counts = {2};
    cfg.schemes = {Scheme::balanced};
    cfg.baselines = {BaselineKind::round_robin, BaselineKind::greedy_cost};
    cfg.seeds = 1;
    cfg.trace.pattern = TracePattern::constant;
    cfg.trace.epochs = 6;
    cfg.trace.base_requests = 30.0;
    cfg.marlin.agent.k_opt = 2;
    cfg.marlin.agent.batch_size = 8;
    cfg.marlin.agent.her_k = 2;
    cfg.marlin.agent.sac.actor_hidden = 16;
    cfg.marlin.agent.sac.critic_hidden = 24;
    cfg.marlin.agent.sac.film_hidden = 8;

    const auto dir_a = temp_dir("expA");
    const auto dir_b = temp_dir("expB");
    cfg.out_dir = dir_a.string();
    const auto res_a = run_experiment(cfg);
    cfg.out_dir = dir_b.string();
    const auto res_b = run_experiment(cfg);

    REQUIRE(res_a.runs.size() == 3);  // one scheme + two baselines
    for (const auto& r : res_a.runs) {
        CHECK(r.phv >= 0.0);
        CHECK(r.served > 0);
        CHECK(r.totals.finite());
    }

    const char* files[] = {
        "marlin-balanced_d2_s1_epochs.csv", "marlin-balanced_d2_s1_pareto.csv",
        "baseline-round_robin_d2_s1_epochs.csv",
        "baseline-greedy_cost_d2_s1_pareto.csv", "summary.csv", "manifest.txt"};
    for (const char* f : files) {
        CAPTURE(f);
        REQUIRE(std::filesystem::exists(dir_a / f));
        CHECK(slurp(dir_a / f) == slurp(dir_b / f));
    }

    // In-memory results agree with each other too.
    REQUIRE(res_b.runs.size() == res_a.runs.size());
    for (std::size_t i = 0; i < res_a.runs.size(); ++i) {
        CHECK(res_a.runs[i].label == res_b.runs[i].label);
        CHECK(res_a.runs[i].phv == res_b.runs[i].phv);
        CHECK(res_a.runs[i].totals.as_array() == res_b.runs[i].totals.as_array());
    }

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}
