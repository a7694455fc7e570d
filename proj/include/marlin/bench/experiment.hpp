#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marlin/bench/baselines.hpp"
#include "marlin/bench/pareto.hpp"
#include "marlin/bench/scenarios.hpp"
#include "marlin/bench/trace.hpp"
#include "marlin/game/marlin.hpp"

namespace marlin {

// Runs one baseline scheduler over the trace with the same bookkeeping as the
// learned scheduler, so both feed the same archives and CSVs.
MarlinRunResult run_baseline(const Environment& env,
                             const std::vector<EpochWorkload>& trace,
                             BaselineKind kind, std::uint64_t seed,
                             const Normalizers& norms);

struct ExperimentConfig {
    std::string out_dir;  // empty: no files, results in memory only

    // World: either sweep the built-in pool over datacenter counts, or run a
    // single externally supplied scenario.
    bool use_default_pool = true;
    std::vector<int> datacenter_counts{8};
    Scenario scenario;  // used when use_default_pool is false

    std::vector<Scheme> schemes{Scheme::balanced};
    std::vector<BaselineKind> baselines;
    std::vector<AblationFlags> ablations;  // applied to schemes.front()
    int seeds = 1;                         // runs seeds 1..N

    TraceConfig trace;  // shape knobs; model/region counts follow the scenario
    std::vector<EpochWorkload> external_trace;  // overrides the generator

    MarlinConfig marlin;  // template; scheme/seed/ablation set per run
    bool write_epoch_csv = true;
};

struct RunSummary {
    std::string label;  // e.g. "marlin-balanced", "baseline-greedy_cost"
    int datacenters = 0;
    std::uint64_t seed = 0;
    double phv = 0.0;  // against the group-wide worst-point reference
    MetricsVector totals;
    double mean_ttft_s = 0.0;
    long long served = 0;
    long long queued = 0;
    long long sla_violations = 0;
    double energy_kwh = 0.0;
    double wall_seconds = 0.0;
    std::vector<ArchivePoint> archive;
};

struct ExperimentResult {
    std::vector<RunSummary> runs;
};

// Full harness: every (datacenter count, seed) group runs all schemes,
// ablations, and baselines on the same seeded workload, then scores PHV
// against the group's shared worst-point reference. Writes per-epoch CSVs,
// Pareto CSVs, a summary table, and a config manifest when out_dir is set;
// all file content is a pure function of (config, seed).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Helpers shared with the CLI and tests.
std::string run_label(const std::string& base, const AblationFlags& flags);
void write_pareto_csv(const std::string& path,
                      const std::vector<ArchivePoint>& archive,
                      const std::string& scheme_label);

}  // namespace marlin
