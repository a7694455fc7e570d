#pragma once

#include <string>
#include <vector>

#include "marlin/core/types.hpp"
#include "marlin/physics/constants.hpp"

namespace marlin {

// Immutable experiment world: datacenters, node classes, model profiles,
// network geometry, physical constants, and the experiment horizon. Shared
// read-only across concurrent agent training after validation.
struct Scenario {
    std::vector<LLMModelProfile> models;
    std::vector<NodeType> node_types;
    std::vector<Datacenter> datacenters;
    std::vector<std::string> regions;
    NetworkParams network;
    physics::PhysicalConstants constants;

    int epochs = 96;
    double epoch_hours = 0.25;  // 15-minute epochs
    double sla_ttft_s = 2.0;

    double epoch_seconds() const { return epoch_hours * 3600.0; }

    int region_index(const std::string& name) const;
    int model_index(const std::string& name) const;
    int node_type_index(const std::string& name) const;
};

// Checks every structural invariant and returns all violations (empty means
// valid). Pure: same inputs produce the same verdict.
std::vector<std::string> validate_scenario(const Scenario& s);

// Convenience wrapper that throws with the joined violation list.
void require_valid(const Scenario& s);

// Scenario file I/O (JSON tree of key-value tables; intensity series either
// inline arrays or `epoch,value` CSV paths resolved relative to the file).
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path,
                   bool series_as_csv = false);

}  // namespace marlin
