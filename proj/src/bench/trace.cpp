#include "marlin/bench/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "marlin/util/csv.hpp"

namespace marlin {

const char* to_string(TracePattern p) {
    switch (p) {
        case TracePattern::diurnal: return "diurnal";
        case TracePattern::bursty: return "bursty";
        case TracePattern::constant: return "constant";
        case TracePattern::step: return "step";
    }
    return "diurnal";
}

TracePattern trace_pattern_from_string(const std::string& name) {
    for (TracePattern p : {TracePattern::diurnal, TracePattern::bursty,
                           TracePattern::constant, TracePattern::step})
        if (name == to_string(p)) return p;
    throw std::invalid_argument("unknown trace pattern: " + name);
}

namespace {

double class_share(const TraceConfig& cfg, int model) {
    if (cfg.num_models == 1) return 1.0;
    if (model == 0) return cfg.model_mix;
    return (1.0 - cfg.model_mix) / static_cast<double>(cfg.num_models - 1);
}

}  // namespace

double trace_mean(const TraceConfig& cfg, int model, int region, int epoch) {
    const double base = cfg.base_requests * class_share(cfg, model);
    switch (cfg.pattern) {
        case TracePattern::constant:
            return base;
        case TracePattern::step:
            return epoch >= cfg.step_epoch ? base * cfg.step_factor : base;
        case TracePattern::diurnal:
        case TracePattern::bursty: {
            const double epochs_per_day = std::max(1.0, 24.0 / cfg.epoch_hours);
            const double phase =
                6.283185307179586 *
                (static_cast<double>(epoch) / epochs_per_day +
                 static_cast<double>(region) /
                     static_cast<double>(std::max(1, cfg.num_regions)));
            return base * (1.0 + cfg.diurnal_amplitude * std::sin(phase));
        }
    }
    return base;
}

double trace_avg_input_tokens(int model) { return 256.0 * (1.0 + model); }
double trace_avg_output_tokens(int model) { return 128.0 * (1.0 + model); }

std::vector<EpochWorkload> synth_trace(const TraceConfig& cfg, std::uint64_t seed) {
    if (cfg.epochs <= 0 || cfg.num_models <= 0 || cfg.num_regions <= 0)
        throw std::invalid_argument("synth_trace: counts must be positive");
    std::vector<EpochWorkload> trace(static_cast<std::size_t>(cfg.epochs));
    for (int e = 0; e < cfg.epochs; ++e) {
        trace[e].epoch_index = e;
        for (int m = 0; m < cfg.num_models; ++m)
            for (int r = 0; r < cfg.num_regions; ++r) {
                Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(e) + 1,
                                      static_cast<std::uint64_t>(m) *
                                              cfg.num_regions +
                                          r + 1);
                double mean = trace_mean(cfg, m, r, e);
                long long count = 0;
                switch (cfg.pattern) {
                    case TracePattern::step:
                        count = std::llround(mean);
                        break;
                    case TracePattern::bursty: {
                        if (rng.uniform() < cfg.burst_rate)
                            mean *= std::min(cfg.burst_cap,
                                             rng.pareto(cfg.burst_alpha));
                        count = rng.poisson(mean);
                        break;
                    }
                    default:
                        count = rng.poisson(mean);
                        break;
                }
                if (count <= 0) continue;
                trace[e].entries.push_back({m, r, count,
                                            trace_avg_output_tokens(m),
                                            trace_avg_input_tokens(m)});
            }
    }
    return trace;
}

std::vector<EpochWorkload> load_trace_csv(const std::string& path,
                                          const Scenario& s) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty trace file: " + path);

    std::vector<EpochWorkload> trace;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 6 fields");
        const int epoch = std::stoi(f[0]);
        const int model = s.model_index(f[1]);
        const int region = s.region_index(f[2]);
        if (epoch < 0 || model < 0 || region < 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown epoch/model/region");
        if (static_cast<std::size_t>(epoch) >= trace.size()) {
            const std::size_t old = trace.size();
            trace.resize(static_cast<std::size_t>(epoch) + 1);
            for (std::size_t e = old; e < trace.size(); ++e)
                trace[e].epoch_index = static_cast<int>(e);
        }
        trace[epoch].entries.push_back({model, region, std::stoll(f[3]),
                                        std::stod(f[5]), std::stod(f[4])});
    }
    return trace;
}

void save_trace_csv(const std::string& path,
                    const std::vector<EpochWorkload>& trace, const Scenario& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << "epoch,model_class,origin_region,requests,avg_in_tokens,avg_out_tokens\n";
    for (const auto& w : trace)
        for (const auto& e : w.entries)
            out << w.epoch_index << ',' << s.models.at(e.model).id << ','
                << s.regions.at(e.region) << ',' << e.request_count << ','
                << fmt_double(e.avg_input_tokens) << ','
                << fmt_double(e.avg_output_tokens) << '\n';
}

}  // namespace marlin
