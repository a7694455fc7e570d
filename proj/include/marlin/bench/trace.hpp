#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marlin/core/scenario.hpp"
#include "marlin/core/types.hpp"
#include "marlin/util/rng.hpp"

namespace marlin {

enum class TracePattern { diurnal, bursty, constant, step };

const char* to_string(TracePattern p);
TracePattern trace_pattern_from_string(const std::string& name);  // throws

// Synthetic workload shape. Each (model class, region) series follows the
// pattern around `base_requests` scaled by the class mix, with the diurnal
// phase shifted per region (regions wake at different times).
struct TraceConfig {
    TracePattern pattern = TracePattern::diurnal;
    int epochs = 96;
    double epoch_hours = 0.25;
    int num_models = 2;
    int num_regions = 4;
    double base_requests = 1000.0;   // mean requests per series per epoch
    double model_mix = 0.7;          // class-0 share; rest split evenly
    double diurnal_amplitude = 0.6;  // relative swing of the sinusoid
    double burst_rate = 0.02;        // per-series spike probability per epoch
    double burst_alpha = 1.1;        // Pareto tail of spike multipliers
    double burst_cap = 50.0;         // spike multiplier ceiling
    double step_factor = 2.0;        // level multiplier after step_epoch
    int step_epoch = 50;
};

// Expected request count of a series at an epoch (before sampling noise).
// The step pattern is exactly this value; the others add Poisson noise.
double trace_mean(const TraceConfig& cfg, int model, int region, int epoch);

// Per-class token profile: class 0 is a light chat class, higher classes
// grow heavier.
double trace_avg_input_tokens(int model);
double trace_avg_output_tokens(int model);

std::vector<EpochWorkload> synth_trace(const TraceConfig& cfg, std::uint64_t seed);

// Trace file rows: epoch,model_class,origin_region,requests,avg_in_tokens,
// avg_out_tokens (names resolved against the scenario).
std::vector<EpochWorkload> load_trace_csv(const std::string& path,
                                          const Scenario& s);
void save_trace_csv(const std::string& path,
                    const std::vector<EpochWorkload>& trace, const Scenario& s);

}  // namespace marlin
