#include "marlin/core/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "marlin/util/csv.hpp"
#include <json.hpp>

namespace marlin {

namespace fs = std::filesystem;
using nlohmann::json;

int Scenario::region_index(const std::string& name) const {
    for (std::size_t i = 0; i < regions.size(); ++i)
        if (regions[i] == name) return static_cast<int>(i);
    return -1;
}

int Scenario::model_index(const std::string& name) const {
    for (std::size_t i = 0; i < models.size(); ++i)
        if (models[i].id == name) return static_cast<int>(i);
    return -1;
}

int Scenario::node_type_index(const std::string& name) const {
    for (std::size_t i = 0; i < node_types.size(); ++i)
        if (node_types[i].id == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> errors;
    auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

    if (s.datacenters.empty()) fail("no datacenters");
    if (s.models.empty()) fail("no model profiles");
    if (s.node_types.empty()) fail("no node types");
    if (s.regions.empty()) fail("no origin regions");
    if (s.epochs < 1) fail("epoch count must be >= 1");
    if (!(s.epoch_hours > 0)) fail("epoch duration must be > 0");
    if (!(s.sla_ttft_s > 0)) fail("SLA TTFT bound must be > 0");
    if (!s.constants.valid()) fail("physical constants must all be > 0");

    // GPU kinds actually used by the fleet; every model needs an exec entry.
    std::set<GpuKind> used_kinds;
    for (std::size_t t = 0; t < s.node_types.size(); ++t) {
        const auto& nt = s.node_types[t];
        used_kinds.insert(nt.gpu_kind);
        if (!(nt.mem_total_gb > 0))
            fail("node type " + nt.id + ": mem_total_gb must be > 0");
        if (nt.gpu_count != 2 && nt.gpu_count != 4 && nt.gpu_count != 8)
            fail("node type " + nt.id + ": gpu_count must be 2, 4, or 8");
        if (!(nt.bandwidth_gbps > 0))
            fail("node type " + nt.id + ": bandwidth_gbps must be > 0");
        if (!(nt.tdp_kw > 0)) fail("node type " + nt.id + ": tdp_kw must be > 0");
        if (nt.pstate_fractions.empty()) {
            fail("node type " + nt.id + ": pstate_fractions empty");
        } else {
            double prev = 0.0;
            for (double f : nt.pstate_fractions) {
                if (!(f > 0.0) || f > 1.0 || f < prev) {
                    fail("node type " + nt.id +
                         ": pstate_fractions must be ascending within (0,1]");
                    break;
                }
                prev = f;
            }
        }
    }

    for (const auto& m : s.models) {
        if (!(m.mem_footprint_gb > 0))
            fail("model " + m.id + ": mem_footprint_gb must be > 0");
        if (!(m.kv_per_token_mb > 0))
            fail("model " + m.id + ": kv_per_token_mb must be > 0");
        for (GpuKind k : used_kinds) {
            auto it = m.exec_ms_per_token.find(k);
            if (it == m.exec_ms_per_token.end())
                fail("model " + m.id + ": missing exec profile for GPU kind " +
                     to_string(k));
            else if (!(it->second > 0))
                fail("model " + m.id + ": exec_ms_per_token for " + to_string(k) +
                     " must be > 0");
        }
    }

    for (const auto& dc : s.datacenters) {
        if (!(dc.cop > 0)) fail("datacenter " + dc.id + ": cop must be > 0");
        if (!(dc.phi >= 0.0 && dc.phi < 1.0))
            fail("datacenter " + dc.id + ": phi must be in [0,1)");
        if (dc.gi_l_per_kwh < 0)
            fail("datacenter " + dc.id + ": gi_l_per_kwh must be >= 0");
        if (static_cast<int>(dc.ci_series.size()) < s.epochs)
            fail("datacenter " + dc.id + ": ci_series length " +
                 std::to_string(dc.ci_series.size()) + " < epochs " +
                 std::to_string(s.epochs));
        if (static_cast<int>(dc.tou_series.size()) < s.epochs)
            fail("datacenter " + dc.id + ": tou_series length " +
                 std::to_string(dc.tou_series.size()) + " < epochs " +
                 std::to_string(s.epochs));
        if (dc.node_counts.empty()) fail("datacenter " + dc.id + ": no nodes");
        for (auto& [t, c] : dc.node_counts) {
            if (t < 0 || t >= static_cast<int>(s.node_types.size()))
                fail("datacenter " + dc.id + ": unknown node type index " +
                     std::to_string(t));
            if (c <= 0)
                fail("datacenter " + dc.id + ": non-positive node count");
        }
        for (const auto& region : s.regions) {
            if (!dc.hop_counts.count(region))
                fail("datacenter " + dc.id + ": missing hop count for region " + region);
            else if (dc.hop_counts.at(region) < 0)
                fail("datacenter " + dc.id + ": negative hop count for region " + region);
        }
    }

    if (s.network.lambda_media_ms_per_km < 0) fail("lambda_media must be >= 0");
    if (s.network.sigma_hop_ms < 0) fail("sigma_hop must be >= 0");
    for (const auto& region : s.regions)
        if (!s.network.region_coords.count(region))
            fail("network: missing coordinates for region " + region);

    return errors;
}

void require_valid(const Scenario& s) {
    auto errors = validate_scenario(s);
    if (errors.empty()) return;
    std::ostringstream msg;
    msg << "invalid scenario (" << errors.size() << " violations):";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
}

namespace {

GpuKind parse_gpu_kind(const std::string& name) {
    if (name == "A100") return GpuKind::A100;
    if (name == "H100") return GpuKind::H100;
    throw std::runtime_error("unknown GPU kind: " + name);
}

std::vector<double> load_series(const json& j, const fs::path& base_dir) {
    if (j.is_string()) {
        fs::path p = j.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        return load_series_csv(p.string());
    }
    return j.get<std::vector<double>>();
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json j;
    in >> j;
    const fs::path base_dir = fs::path(path).parent_path();

    Scenario s;
    s.epochs = j.value("epochs", 96);
    s.epoch_hours = j.value("epoch_hours", 0.25);
    s.sla_ttft_s = j.value("sla_ttft_s", 2.0);

    if (j.contains("constants")) {
        const auto& c = j["constants"];
        s.constants.j_water_mj_per_l = c.value("j_water_mj_per_l", 2.257);
        s.constants.ei_pot_kwh_per_l = c.value("ei_pot_kwh_per_l", 0.0004);
        s.constants.ei_waste_kwh_per_l = c.value("ei_waste_kwh_per_l", 0.0008);
        s.constants.cooling_multiplier = c.value("cooling_multiplier", 3.0);
        s.constants.infra_fraction = c.value("infra_fraction", 0.13);
    }

    const auto& net = j.at("network");
    s.network.lambda_media_ms_per_km = net.value("lambda_media_ms_per_km", 0.005);
    s.network.sigma_hop_ms = net.value("sigma_hop_ms", 0.5);
    for (const auto& r : net.at("regions")) {
        const auto name = r.at("name").get<std::string>();
        s.regions.push_back(name);
        s.network.region_coords[name] = {r.at("lat").get<double>(),
                                         r.at("lon").get<double>()};
    }

    for (const auto& m : j.at("models")) {
        LLMModelProfile prof;
        prof.id = m.at("id").get<std::string>();
        prof.mem_footprint_gb = m.at("mem_footprint_gb").get<double>();
        prof.kv_per_token_mb = m.at("kv_per_token_mb").get<double>();
        for (auto& [kind, ms] : m.at("exec_ms_per_token").items())
            prof.exec_ms_per_token[parse_gpu_kind(kind)] = ms.get<double>();
        s.models.push_back(std::move(prof));
    }

    for (const auto& n : j.at("node_types")) {
        NodeType nt;
        nt.id = n.at("id").get<std::string>();
        nt.gpu_kind = parse_gpu_kind(n.at("gpu_kind").get<std::string>());
        nt.gpu_count = n.at("gpu_count").get<int>();
        nt.mem_total_gb = n.at("mem_total_gb").get<double>();
        nt.bandwidth_gbps = n.at("bandwidth_gbps").get<double>();
        nt.tdp_kw = n.at("tdp_kw").get<double>();
        nt.pstate_fractions = n.at("pstate_fractions").get<std::vector<double>>();
        s.node_types.push_back(std::move(nt));
    }

    for (const auto& d : j.at("datacenters")) {
        Datacenter dc;
        dc.id = d.at("id").get<std::string>();
        dc.location = {d.at("lat").get<double>(), d.at("lon").get<double>()};
        dc.cop = d.at("cop").get<double>();
        dc.gi_l_per_kwh = d.at("gi_l_per_kwh").get<double>();
        dc.phi = d.value("phi", 0.2);
        for (auto& [type_id, count] : d.at("node_counts").items()) {
            const int t = s.node_type_index(type_id);
            if (t < 0) throw std::runtime_error("datacenter " + dc.id +
                                                ": unknown node type " + type_id);
            dc.node_counts.emplace_back(t, count.get<int>());
        }
        std::sort(dc.node_counts.begin(), dc.node_counts.end());
        dc.ci_series = load_series(d.at("ci_series"), base_dir);
        dc.tou_series = load_series(d.at("tou_series"), base_dir);
        if (d.contains("hop_counts"))
            for (auto& [region, hops] : d.at("hop_counts").items())
                dc.hop_counts[region] = hops.get<int>();
        s.datacenters.push_back(std::move(dc));
    }

    return s;
}

void save_scenario(const Scenario& s, const std::string& path, bool series_as_csv) {
    const fs::path base_dir = fs::path(path).parent_path();
    json j;
    j["epochs"] = s.epochs;
    j["epoch_hours"] = s.epoch_hours;
    j["sla_ttft_s"] = s.sla_ttft_s;
    j["constants"] = {{"j_water_mj_per_l", s.constants.j_water_mj_per_l},
                      {"ei_pot_kwh_per_l", s.constants.ei_pot_kwh_per_l},
                      {"ei_waste_kwh_per_l", s.constants.ei_waste_kwh_per_l},
                      {"cooling_multiplier", s.constants.cooling_multiplier},
                      {"infra_fraction", s.constants.infra_fraction}};

    // Regions as an ordered array: indices into `regions` key workloads and
    // plans, so file order must survive the round trip.
    json regions = json::array();
    for (const auto& name : s.regions) {
        const auto& coords = s.network.region_coords.at(name);
        regions.push_back({{"name", name}, {"lat", coords.lat}, {"lon", coords.lon}});
    }
    j["network"] = {{"lambda_media_ms_per_km", s.network.lambda_media_ms_per_km},
                    {"sigma_hop_ms", s.network.sigma_hop_ms},
                    {"regions", regions}};

    j["models"] = json::array();
    for (const auto& m : s.models) {
        json exec = json::object();
        for (auto& [kind, ms] : m.exec_ms_per_token) exec[to_string(kind)] = ms;
        j["models"].push_back({{"id", m.id},
                               {"mem_footprint_gb", m.mem_footprint_gb},
                               {"kv_per_token_mb", m.kv_per_token_mb},
                               {"exec_ms_per_token", exec}});
    }

    j["node_types"] = json::array();
    for (const auto& nt : s.node_types)
        j["node_types"].push_back({{"id", nt.id},
                                   {"gpu_kind", to_string(nt.gpu_kind)},
                                   {"gpu_count", nt.gpu_count},
                                   {"mem_total_gb", nt.mem_total_gb},
                                   {"bandwidth_gbps", nt.bandwidth_gbps},
                                   {"tdp_kw", nt.tdp_kw},
                                   {"pstate_fractions", nt.pstate_fractions}});

    j["datacenters"] = json::array();
    for (const auto& dc : s.datacenters) {
        json counts = json::object();
        for (auto& [t, c] : dc.node_counts) counts[s.node_types[t].id] = c;
        json hops = json::object();
        for (auto& [region, h] : dc.hop_counts) hops[region] = h;
        json entry = {{"id", dc.id},          {"lat", dc.location.lat},
                      {"lon", dc.location.lon}, {"cop", dc.cop},
                      {"gi_l_per_kwh", dc.gi_l_per_kwh}, {"phi", dc.phi},
                      {"node_counts", counts}, {"hop_counts", hops}};
        if (series_as_csv) {
            const std::string ci_name = dc.id + "_ci.csv";
            const std::string tou_name = dc.id + "_tou.csv";
            save_series_csv((base_dir / ci_name).string(), dc.ci_series);
            save_series_csv((base_dir / tou_name).string(), dc.tou_series);
            entry["ci_series"] = ci_name;
            entry["tou_series"] = tou_name;
        } else {
            entry["ci_series"] = dc.ci_series;
            entry["tou_series"] = dc.tou_series;
        }
        j["datacenters"].push_back(std::move(entry));
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace marlin
