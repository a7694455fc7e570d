#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marlin/forecast/predictor.hpp"
#include "marlin/game/agents.hpp"
#include "marlin/game/consensus.hpp"

namespace marlin {

// Objective-weighting schemes: one balanced run and one run dominated by
// each single objective.
enum class Scheme { balanced, min_latency, min_carbon, min_water, min_cost };

inline constexpr Scheme kAllSchemes[] = {Scheme::balanced, Scheme::min_latency,
                                         Scheme::min_carbon, Scheme::min_water,
                                         Scheme::min_cost};

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);  // throws on unknown
ObjectiveWeights scheme_weights(Scheme s);

// Component switches for the ablation study; everything on by default.
struct AblationFlags {
    bool no_veto = false;
    bool no_film = false;
    bool no_sgd = false;
    bool no_dual_buffer = false;
    bool no_her = false;
    bool no_capital = false;
    bool no_phase2 = false;
};

// Parses a comma-separated flag list ("no_veto,no_her"); throws on unknown.
AblationFlags ablation_from_string(const std::string& flags);
std::string to_string(const AblationFlags& a);

struct MarlinConfig {
    Scheme scheme = Scheme::balanced;
    AblationFlags ablation;
    std::uint64_t seed = 1;
    AgentConfig agent;  // template; objective index is set per agent
    CapitalConfig capital;
    ConsensusConfig consensus;
    double forecast_alpha = 0.3;
    int forecast_window = 8;
};

// One non-dominated point of a run: per-served-request metrics, so fronts
// compare scheduling quality rather than workload volume.
struct ArchivePoint {
    MetricsVector metrics;
    int epoch = -1;
};

// Inserts with dominance pruning; returns false when p was dominated.
bool archive_insert(std::vector<ArchivePoint>& archive, const ArchivePoint& p);

struct EpochRecord {
    int epoch = 0;
    std::vector<double> plan;  // applied routing, flat
    EpochResult result;        // actual-workload outcome (allocation omitted)
    MetricsVector per_request;
    std::vector<double> proposal_rewards;
    std::vector<double> blend_weights;
    std::vector<double> capitals;
    std::vector<VetoEvent> vetoes;
};

struct MarlinRunResult {
    std::vector<EpochRecord> records;
    std::vector<ArchivePoint> archive;  // non-dominated across the run
    Normalizers normalizers;
    double wall_seconds = 0.0;
};

// Reference scales for commensurable objectives: per-metric maxima over one
// pass of the trace under the round-robin baseline plan.
Normalizers compute_normalizers(const Environment& env,
                                const std::vector<EpochWorkload>& trace);

// The full scheduler: per epoch, forecast the workload, train every agent
// against the predicted epoch (phase 1), blend proposals through the
// consensus round (phase 2), commit the blended plan against the actual
// workload, then update the predictor and capital ledger.
MarlinRunResult run_marlin(const Environment& env,
                           const std::vector<EpochWorkload>& trace,
                           const MarlinConfig& cfg);

}  // namespace marlin
