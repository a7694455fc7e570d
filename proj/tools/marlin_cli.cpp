#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "marlin/bench/experiment.hpp"

namespace {

using namespace marlin;

int cmd_validate(const std::string& config) {
    const Scenario s = load_scenario(config);
    const auto violations = validate_scenario(s);
    if (violations.empty()) {
        std::cout << "scenario ok: " << s.datacenters.size() << " datacenters, "
                  << s.models.size() << " models, " << s.epochs << " epochs\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << "violation: " << v << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geo-distributed LLM inference scheduling testbed"};
    app.require_subcommand(1);

    // --- run: full experiment harness ---------------------------------
    auto* run = app.add_subcommand("run", "Run schedulers over a workload");
    std::string config_path;
    std::string scheme_arg = "balanced";
    std::string baselines_arg;
    std::vector<int> datacenters{8};
    int epochs = 96;
    int seeds = 1;
    std::string ablate_arg;
    std::string trace_arg = "synthetic:diurnal";
    double base_requests = 1000.0;
    std::string out_dir = "out";
    int k_opt = 12;
    run->add_option("--config", config_path,
                    "Scenario JSON (default: built-in pool)");
    run->add_option("--scheme", scheme_arg,
                    "balanced|min-latency|min-carbon|min-water|min-cost|all|none");
    run->add_option("--baselines", baselines_arg,
                    "Comma list of baselines, or 'all'");
    run->add_option("--datacenters", datacenters,
                    "Datacenter counts to sweep (built-in pool only)")
        ->delimiter(',');
    run->add_option("--epochs", epochs, "Trace length in epochs");
    run->add_option("--seeds", seeds, "Number of seeds (1..N)");
    run->add_option("--ablate", ablate_arg,
                    "Comma list of component switches, e.g. no_veto,no_her");
    run->add_option("--trace", trace_arg, "synthetic:PATTERN or csv:PATH");
    run->add_option("--base-requests", base_requests,
                    "Synthetic trace scale (requests per series per epoch)");
    run->add_option("--k-opt", k_opt, "Inner optimization samples per epoch");
    run->add_option("--out", out_dir, "Output directory");

    // --- validate ------------------------------------------------------
    auto* validate = app.add_subcommand("validate", "Validate a scenario file");
    std::string validate_path;
    validate->add_option("--config", validate_path, "Scenario JSON")->required();

    // --- trace: emit a synthetic workload CSV --------------------------
    auto* trace_cmd = app.add_subcommand("trace", "Generate a synthetic trace");
    std::string pattern_arg = "diurnal";
    int trace_epochs = 96;
    std::uint64_t trace_seed = 1;
    double trace_base = 1000.0;
    std::string trace_out = "trace.csv";
    int trace_dcs = 8;
    trace_cmd->add_option("--pattern", pattern_arg,
                          "diurnal|bursty|constant|step");
    trace_cmd->add_option("--epochs", trace_epochs, "Epochs to generate");
    trace_cmd->add_option("--seed", trace_seed, "Generator seed");
    trace_cmd->add_option("--base-requests", trace_base, "Mean per series");
    trace_cmd->add_option("--datacenters", trace_dcs,
                          "Pool size used to name models/regions");
    trace_cmd->add_option("--out", trace_out, "Output CSV path");

    // --- scenario: emit the built-in pool as JSON -----------------------
    auto* scen_cmd = app.add_subcommand("scenario", "Emit a built-in scenario");
    int scen_dcs = 8;
    int scen_epochs = 96;
    std::string scen_out = "scenario.json";
    scen_cmd->add_option("--datacenters", scen_dcs, "Pool slice size (1..12)");
    scen_cmd->add_option("--epochs", scen_epochs, "Series length");
    scen_cmd->add_option("--out", scen_out, "Output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_path);

        if (trace_cmd->parsed()) {
            TraceConfig tc;
            tc.pattern = trace_pattern_from_string(pattern_arg);
            tc.epochs = trace_epochs;
            tc.base_requests = trace_base;
            const Scenario s = default_scenario(trace_dcs, trace_epochs);
            tc.num_models = static_cast<int>(s.models.size());
            tc.num_regions = static_cast<int>(s.regions.size());
            save_trace_csv(trace_out, synth_trace(tc, trace_seed), s);
            std::cout << "wrote " << trace_out << '\n';
            return 0;
        }

        if (scen_cmd->parsed()) {
            save_scenario(default_scenario(scen_dcs, scen_epochs), scen_out);
            std::cout << "wrote " << scen_out << '\n';
            return 0;
        }

        // run
        ExperimentConfig cfg;
        cfg.out_dir = out_dir;
        cfg.seeds = seeds;
        cfg.trace.epochs = epochs;
        cfg.trace.base_requests = base_requests;
        cfg.marlin.agent.k_opt = k_opt;

        if (scheme_arg == "all") {
            cfg.schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
        } else if (scheme_arg == "none") {
            cfg.schemes.clear();
        } else {
            cfg.schemes = {scheme_from_string(scheme_arg)};
        }
        if (!baselines_arg.empty())
            cfg.baselines = parse_baseline_list(baselines_arg);
        if (!ablate_arg.empty())
            cfg.ablations = {ablation_from_string(ablate_arg)};

        if (!config_path.empty()) {
            cfg.use_default_pool = false;
            cfg.scenario = load_scenario(config_path);
        } else {
            cfg.datacenter_counts = datacenters;
        }

        if (trace_arg.rfind("csv:", 0) == 0) {
            const Scenario& s = cfg.use_default_pool
                                    ? default_scenario(datacenters.front(), epochs)
                                    : cfg.scenario;
            cfg.external_trace = load_trace_csv(trace_arg.substr(4), s);
        } else if (trace_arg.rfind("synthetic:", 0) == 0) {
            cfg.trace.pattern =
                trace_pattern_from_string(trace_arg.substr(10));
        } else {
            throw std::invalid_argument("--trace must be synthetic:PATTERN or csv:PATH");
        }

        const ExperimentResult result = run_experiment(cfg);
        std::cout << "label,datacenters,seed,phv,mean_ttft_s,carbon_kg,water_l,"
                     "cost_usd\n";
        for (const auto& r : result.runs)
            std::cout << r.label << ',' << r.datacenters << ',' << r.seed << ','
                      << r.phv << ',' << r.mean_ttft_s << ','
                      << r.totals.carbon_kg << ',' << r.totals.water_l << ','
                      << r.totals.cost_usd << '\n';
        if (!out_dir.empty()) std::cout << "outputs in " << out_dir << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
