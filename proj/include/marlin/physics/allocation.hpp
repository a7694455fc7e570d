#pragma once

#include <vector>

namespace marlin {

// A group of identical requests served by one node during one epoch.
struct ServedSlice {
    int model = -1;          // model profile index
    int origin_region = -1;  // origin region index
    int count = 0;           // requests in this slice
    double avg_input_tokens = 0.0;
    double avg_output_tokens = 0.0;
    bool cold_load = false;     // weights were fetched this epoch
    double queue_delay_s = 0.0; // extra latency carried from a prior epoch

    double tokens_per_request() const { return avg_input_tokens + avg_output_tokens; }
};

// One powered node and the work assigned to it.
struct NodeAllocation {
    int node_type = -1;
    double pstate_fraction = 1.0;  // fraction of TDP drawn this epoch
    std::vector<int> resident_models;
    std::vector<ServedSlice> slices;

    int served_count() const {
        int n = 0;
        for (const auto& sl : slices) n += sl.count;
        return n;
    }
};

// Powered nodes of one type with no assigned work (lowest p-state draw).
struct IdleGroup {
    int node_type = -1;
    int count = 0;
};

// Work and power assignment for one datacenter over one epoch.
struct DcAllocation {
    int datacenter = -1;
    std::vector<NodeAllocation> active;
    std::vector<IdleGroup> warm_idle;
    int off_nodes = 0;  // zero draw: no work, no resident models
    int queued = 0;     // requests deferred to the next epoch

    int served_count() const {
        int n = 0;
        for (const auto& node : active) n += node.served_count();
        return n;
    }
};

// Full assignment for one simulated epoch, parallel to Scenario::datacenters.
struct EpochAllocation {
    int epoch = 0;
    std::vector<DcAllocation> dcs;

    int served_count() const {
        int n = 0;
        for (const auto& dc : dcs) n += dc.served_count();
        return n;
    }
    int queued_count() const {
        int n = 0;
        for (const auto& dc : dcs) n += dc.queued;
        return n;
    }
};

}  // namespace marlin
