#include "marlin/sim/env.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "marlin/util/csv.hpp"

namespace marlin {

namespace {

constexpr double kMbPerGb = 1000.0;

// Feature scales that keep observations near [0, 1] for the learners.
constexpr double kGiScale = 70.0;
constexpr double kTouScale = 0.6;
constexpr double kCopScale = 10.0;
constexpr double kQueueScale = 1000.0;

// A group of requests to place inside one datacenter this epoch.
struct WorkItem {
    int model = -1;
    int origin_region = -1;
    int count = 0;
    double avg_input_tokens = 0.0;
    double avg_output_tokens = 0.0;
    double delay_s = 0.0;
};

// Mutable per-node bookkeeping while the balancer fills one epoch.
struct NodeWork {
    std::vector<int> kept;  // residents surviving so far (includes new loads)
    std::vector<int> used;  // models actually serving this epoch
    double mf_gb = 0.0;     // footprint of kept residents
    double kv_gb = 0.0;     // KV assigned so far
    std::vector<ServedSlice> slices;

    bool has_kept(int m) const {
        return std::find(kept.begin(), kept.end(), m) != kept.end();
    }
    bool has_used(int m) const {
        return std::find(used.begin(), used.end(), m) != used.end();
    }
};

struct Candidate {
    int node = -1;
    int capacity = 0;  // requests that still fit (clamped to the group size)
    bool cold = false;
    std::vector<int> evict;  // residents to drop if this node is chosen
};

}  // namespace

double weighted_objective(const MetricsVector& metrics, const ObjectiveWeights& w,
                          const Normalizers& n) {
    double obj = 0.0;
    for (int j = 0; j < kNumObjectives; ++j) obj += w.w[j] * n.normalized(metrics, j);
    return obj;
}

std::vector<int> split_largest_remainder(int total,
                                         std::span<const double> fractions) {
    const int d = static_cast<int>(fractions.size());
    std::vector<int> counts(d, 0);
    if (total <= 0 || d == 0) return counts;
    std::vector<std::pair<double, int>> remainders;
    remainders.reserve(d);
    int assigned = 0;
    for (int i = 0; i < d; ++i) {
        const double exact = total * fractions[i];
        counts[i] = static_cast<int>(std::floor(exact));
        assigned += counts[i];
        remainders.emplace_back(exact - counts[i], i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int k = 0; k < total - assigned; ++k) counts[remainders[k].second] += 1;
    return counts;
}

Environment::Environment(const Scenario& scenario) : scenario_(&scenario) {
    require_valid(scenario);
    num_models_ = static_cast<int>(scenario.models.size());
    num_regions_ = static_cast<int>(scenario.regions.size());
    num_dcs_ = static_cast<int>(scenario.datacenters.size());

    net_latency_s_.resize(static_cast<std::size_t>(num_regions_) * num_dcs_);
    for (int r = 0; r < num_regions_; ++r)
        for (int d = 0; d < num_dcs_; ++d)
            net_latency_s_[r * num_dcs_ + d] =
                network_latency_ms(scenario.regions[r], scenario.datacenters[d],
                                   scenario.network) /
                1000.0;

    const int t_count = static_cast<int>(scenario.node_types.size());
    exec_s_.resize(static_cast<std::size_t>(num_models_) * t_count);
    for (int m = 0; m < num_models_; ++m)
        for (int t = 0; t < t_count; ++t)
            exec_s_[m * t_count + t] = scenario.models[m].exec_ms_per_token.at(
                                           scenario.node_types[t].gpu_kind) /
                                       1000.0;
}

EnvState Environment::initial_state() const {
    EnvState state;
    state.epoch = 0;
    state.dcs.resize(num_dcs_);
    state.snapshots.resize(num_dcs_);
    for (int d = 0; d < num_dcs_; ++d) {
        const auto& dc = scenario_->datacenters[d];
        auto counts = dc.node_counts;
        std::sort(counts.begin(), counts.end());
        for (auto& [type, count] : counts)
            for (int i = 0; i < count; ++i)
                state.dcs[d].nodes.push_back(NodeState{type, {}});
        state.snapshots[d] = {dc.ci_series[0], dc.gi_l_per_kwh, dc.tou_series[0],
                              dc.cop, 1.0};
    }
    state.forecast.assign(static_cast<std::size_t>(num_models_) * num_regions_, 0.0);
    return state;
}

EpochResult Environment::evaluate_plan(const EnvState& state,
                                       const EpochWorkload& workload,
                                       const SchedulingPlan& plan) const {
    return simulate(state, workload, plan, nullptr);
}

EpochResult Environment::apply_plan(EnvState& state, const EpochWorkload& workload,
                                    const SchedulingPlan& plan) const {
    EnvState next;
    EpochResult result = simulate(state, workload, plan, &next);
    state = std::move(next);
    return result;
}

EpochResult Environment::simulate(const EnvState& state,
                                  const EpochWorkload& workload,
                                  const SchedulingPlan& plan, EnvState* next) const {
    if (plan.models() != num_models_ || plan.regions() != num_regions_ ||
        plan.dcs() != num_dcs_)
        throw std::invalid_argument("plan dimensions do not match scenario");
    if (workload.epoch_index != state.epoch)
        throw std::invalid_argument("workload epoch does not match state epoch");
    std::string why;
    if (!plan.simplex_valid(&why)) throw std::invalid_argument("invalid plan: " + why);

    const auto& s = *scenario_;
    const int epoch = state.epoch;
    const double epoch_s = s.epoch_seconds();
    const int t_count = static_cast<int>(s.node_types.size());

    // Route every workload entry across datacenters by its plan row; carried
    // queues are served before fresh arrivals.
    std::vector<std::vector<WorkItem>> dc_work(num_dcs_);
    for (int d = 0; d < num_dcs_; ++d) {
        dc_work[d].reserve(state.dcs[d].queue.size() + workload.entries.size());
        for (const auto& q : state.dcs[d].queue)
            dc_work[d].push_back({q.model, q.origin_region, q.count,
                                  q.avg_input_tokens, q.avg_output_tokens, q.delay_s});
    }
    for (const auto& entry : workload.entries) {
        if (entry.request_count <= 0) continue;
        const auto counts = split_largest_remainder(
            static_cast<int>(entry.request_count), plan.row(entry.model, entry.region));
        for (int d = 0; d < num_dcs_; ++d)
            if (counts[d] > 0)
                dc_work[d].push_back({entry.model, entry.region, counts[d],
                                      entry.avg_input_tokens, entry.avg_output_tokens,
                                      0.0});
    }

    EpochResult result;
    result.allocation.epoch = epoch;
    result.allocation.dcs.resize(num_dcs_);
    result.per_dc.resize(num_dcs_);
    if (next) {
        *next = state;
        next->epoch = epoch + 1;
    }

    std::vector<EnergyBreakdown> per_dc_energy(num_dcs_);
    int fleet_nodes = 0;
    int fleet_active = 0;

    for (int d = 0; d < num_dcs_; ++d) {
        const auto& dc_state = state.dcs[d];
        const auto& dc = s.datacenters[d];
        const int n_nodes = static_cast<int>(dc_state.nodes.size());

        std::vector<NodeWork> work(n_nodes);
        for (int n = 0; n < n_nodes; ++n) {
            work[n].kept = dc_state.nodes[n].resident_models;
            for (int m : work[n].kept) work[n].mf_gb += s.models[m].mem_footprint_gb;
        }

        const int cursor = n_nodes > 0 ? dc_state.cursor % n_nodes : 0;
        std::vector<QueuedGroup> next_queue;

        auto node_cap_gb = [&](int n) {
            return s.node_types[dc_state.nodes[n].node_type].mem_total_gb;
        };

        // Requests of model m that still fit on node n, with the eviction
        // (largest unused resident first) that makes a cold load possible.
        auto probe = [&](int n, int m, double kv_req, Candidate* out) {
            const NodeWork& w = work[n];
            const double cap = node_cap_gb(n);
            out->node = n;
            out->evict.clear();
            if (w.has_kept(m)) {
                out->cold = false;
                const double free_gb = cap - w.mf_gb - w.kv_gb;
                out->capacity =
                    free_gb >= kv_req ? static_cast<int>(std::floor(free_gb / kv_req))
                                      : 0;
                return out->capacity > 0;
            }
            out->cold = true;
            double mf = w.mf_gb + s.models[m].mem_footprint_gb;
            if (cap - mf - w.kv_gb < kv_req) {
                std::vector<int> unused;
                for (int r : w.kept)
                    if (!w.has_used(r) && r != m) unused.push_back(r);
                std::sort(unused.begin(), unused.end(), [&](int a, int b) {
                    const double fa = s.models[a].mem_footprint_gb;
                    const double fb = s.models[b].mem_footprint_gb;
                    if (fa != fb) return fa > fb;
                    return a < b;
                });
                for (int r : unused) {
                    mf -= s.models[r].mem_footprint_gb;
                    out->evict.push_back(r);
                    if (cap - mf - w.kv_gb >= kv_req) break;
                }
            }
            if (cap - mf - w.kv_gb < kv_req) return false;
            out->capacity = static_cast<int>(std::floor((cap - mf - w.kv_gb) / kv_req));
            return true;
        };

        for (const auto& item : dc_work[d]) {
            int remaining = item.count;
            const double kv_req = s.models[item.model].kv_per_token_mb *
                                  (item.avg_input_tokens + item.avg_output_tokens) /
                                  kMbPerGb;
            if (remaining > 0 && n_nodes > 0 && kv_req > 0.0) {
                // Warm nodes absorb the group if they can; cold nodes extend
                // the candidate set only when warm capacity runs short. Both
                // passes stop at the minimal prefix, in ring order from the
                // epoch's cursor, so groups pack onto the same nodes until
                // capacity forces the next one.
                std::vector<Candidate> chosen;
                long long capacity = 0;
                for (int step = 0; step < n_nodes && capacity < remaining; ++step) {
                    const int n = (cursor + step) % n_nodes;
                    Candidate c;
                    if (!probe(n, item.model, kv_req, &c) || c.cold) continue;
                    c.capacity = std::min(c.capacity, remaining);
                    capacity += c.capacity;
                    chosen.push_back(std::move(c));
                }
                for (int step = 0; step < n_nodes && capacity < remaining; ++step) {
                    const int n = (cursor + step) % n_nodes;
                    Candidate c;
                    if (!probe(n, item.model, kv_req, &c) || !c.cold) continue;
                    c.capacity = std::min(c.capacity, remaining);
                    capacity += c.capacity;
                    chosen.push_back(std::move(c));
                }

                if (!chosen.empty()) {
                    // Even split with per-node caps: ascending-capacity
                    // water-fill, then leftover units one at a time.
                    std::vector<int> order(chosen.size());
                    std::iota(order.begin(), order.end(), 0);
                    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                        return chosen[a].capacity < chosen[b].capacity;
                    });
                    std::vector<int> take(chosen.size(), 0);
                    int left = remaining;
                    for (std::size_t i = 0; i < order.size(); ++i) {
                        const int quota =
                            left / static_cast<int>(order.size() - i);
                        take[order[i]] = std::min(chosen[order[i]].capacity, quota);
                        left -= take[order[i]];
                    }
                    for (std::size_t i = 0; left > 0 && i < chosen.size(); ++i) {
                        const int add = std::min(chosen[i].capacity - take[i], left);
                        take[i] += add;
                        left -= add;
                    }

                    for (std::size_t i = 0; i < chosen.size(); ++i) {
                        if (take[i] == 0) continue;
                        const Candidate& c = chosen[i];
                        NodeWork& w = work[c.node];
                        if (c.cold) {
                            for (int r : c.evict) {
                                w.kept.erase(
                                    std::find(w.kept.begin(), w.kept.end(), r));
                                w.mf_gb -= s.models[r].mem_footprint_gb;
                            }
                            w.kept.push_back(item.model);
                            w.mf_gb += s.models[item.model].mem_footprint_gb;
                        }
                        if (!w.has_used(item.model)) w.used.push_back(item.model);
                        w.kv_gb += take[i] * kv_req;
                        w.slices.push_back({item.model, item.origin_region, take[i],
                                            item.avg_input_tokens,
                                            item.avg_output_tokens, c.cold,
                                            item.delay_s});
                        remaining -= take[i];
                    }
                }
            }
            if (remaining > 0)
                next_queue.push_back({item.model, item.origin_region, remaining,
                                      item.avg_input_tokens, item.avg_output_tokens,
                                      item.delay_s + epoch_s});
        }

        // Fold per-node work into the epoch allocation and p-state choices:
        // serving nodes run at the top p-state, warm nodes idle at the lowest,
        // empty nodes power off.
        auto& dc_alloc = result.allocation.dcs[d];
        dc_alloc.datacenter = d;
        std::vector<int> idle_by_type(t_count, 0);
        int active_nodes = 0;
        for (int n = 0; n < n_nodes; ++n) {
            NodeWork& w = work[n];
            const int type = dc_state.nodes[n].node_type;
            const bool served = !w.slices.empty();
            if (served) {
                NodeAllocation na;
                na.node_type = type;
                na.pstate_fraction = s.node_types[type].busy_fraction();
                na.resident_models = w.kept;
                na.slices = std::move(w.slices);
                assert(node_memory_usage(na.resident_models, na.slices, s.models) <=
                       node_cap_gb(n) + 1e-9);
                dc_alloc.active.push_back(std::move(na));
                ++active_nodes;
            } else if (!w.kept.empty()) {
                idle_by_type[type] += 1;
            } else {
                dc_alloc.off_nodes += 1;
            }
            if (next) {
                // Weights stay loaded only on nodes that served this epoch:
                // an unused node idles at the floor p-state for one epoch,
                // then unloads and powers off, so standing power follows the
                // working set instead of every node ever touched.
                auto& resident = next->dcs[d].nodes[n].resident_models;
                if (served) {
                    resident = w.kept;
                    std::sort(resident.begin(), resident.end());
                } else {
                    resident.clear();
                }
            }
        }
        for (int t = 0; t < t_count; ++t)
            if (idle_by_type[t] > 0) dc_alloc.warm_idle.push_back({t, idle_by_type[t]});
        for (const auto& q : next_queue) dc_alloc.queued += q.count;

        fleet_nodes += n_nodes;
        fleet_active += active_nodes;

        auto& dr = result.per_dc[d];
        dr.queued = dc_alloc.queued;
        dr.utilization = n_nodes > 0 ? static_cast<double>(active_nodes) / n_nodes : 0.0;

        per_dc_energy[d] = datacenter_energy(dc_alloc, dc, s);
        dr.e_it_kwh = per_dc_energy[d].e_it;
        const auto water = water_usage(per_dc_energy[d], dc, s.constants);
        const auto carbon =
            carbon_emissions(per_dc_energy[d], water, dc, epoch, s.constants);
        dr.metrics.carbon_kg = carbon.z_tot;
        dr.metrics.water_l = water.g_tot;
        dr.metrics.cost_usd = per_dc_energy[d].e_tot * dc.tou_series[epoch];

        // TTFT and SLA per (model, region) group inside this DC.
        std::vector<double> group_ttft(
            static_cast<std::size_t>(num_models_) * num_regions_, 0.0);
        std::vector<int> group_count(group_ttft.size(), 0);
        for (const auto& na : dc_alloc.active) {
            const int type = na.node_type;
            for (const auto& sl : na.slices) {
                const double load_s =
                    sl.cold_load ? weight_load_latency(s.models[sl.model],
                                                       s.node_types[type], false)
                                 : 0.0;
                const double per_req =
                    sl.queue_delay_s + load_s +
                    2.0 * net_latency_s_[sl.origin_region * num_dcs_ + d] +
                    exec_s_[sl.model * t_count + type];
                const std::size_t g =
                    static_cast<std::size_t>(sl.model) * num_regions_ +
                    sl.origin_region;
                group_ttft[g] += sl.count * per_req;
                group_count[g] += sl.count;
            }
        }
        for (std::size_t g = 0; g < group_ttft.size(); ++g) {
            if (group_count[g] == 0) continue;
            dr.metrics.ttft_s += group_ttft[g];
            dr.served += group_count[g];
            if (group_ttft[g] / group_count[g] > s.sla_ttft_s) dr.sla_violations += 1;
        }

        if (next) {
            next->dcs[d].queue = std::move(next_queue);
            // Wear leveling: the packing scan starts one node later each epoch.
            next->dcs[d].cursor = n_nodes > 0 ? (cursor + 1) % n_nodes : 0;
        }
    }

    for (int d = 0; d < num_dcs_; ++d) {
        result.metrics += result.per_dc[d].metrics;
        result.served += result.per_dc[d].served;
        result.queued += result.per_dc[d].queued;
        result.sla_violations += result.per_dc[d].sla_violations;
    }
    result.metrics.cost_usd = energy_cost(per_dc_energy, s.datacenters, epoch);
    result.mean_ttft_s =
        result.served > 0 ? result.metrics.ttft_s / result.served : 0.0;
    result.idle_fraction =
        fleet_nodes > 0 ? 1.0 - static_cast<double>(fleet_active) / fleet_nodes : 0.0;

    if (next) {
        const int snap_epoch = epoch + 1;
        for (int d = 0; d < num_dcs_; ++d) {
            const auto& dc = s.datacenters[d];
            const int i = std::min<int>(
                snap_epoch, static_cast<int>(dc.ci_series.size()) - 1);
            const int k = std::min<int>(
                snap_epoch, static_cast<int>(dc.tou_series.size()) - 1);
            next->snapshots[d] = {dc.ci_series[i], dc.gi_l_per_kwh, dc.tou_series[k],
                                  dc.cop, 1.0 - result.per_dc[d].utilization};
        }
    }
    return result;
}

std::vector<double> Environment::state_features(const EnvState& state) const {
    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(state_dim()));
    for (int d = 0; d < num_dcs_; ++d) {
        const auto& snap = state.snapshots[d];
        int backlog = 0;
        for (const auto& q : state.dcs[d].queue) backlog += q.count;
        f.push_back(snap.availability);
        f.push_back(backlog / (backlog + kQueueScale));
        f.push_back(snap.ci);
        f.push_back(snap.gi / kGiScale);
        f.push_back(snap.tou / kTouScale);
        f.push_back(snap.cop / kCopScale);
    }
    return f;
}

int Environment::state_dim() const { return 6 * num_dcs_; }

std::string epoch_csv_header() {
    return "epoch,dc,ttft_s,carbon_kg,water_l,cost_usd,e_it_kwh,queued,"
           "sla_violations";
}

void append_epoch_csv(std::ostream& out, const Scenario& s, int epoch,
                      const EpochResult& result) {
    for (std::size_t d = 0; d < result.per_dc.size(); ++d) {
        const auto& dr = result.per_dc[d];
        out << epoch << ',' << s.datacenters[d].id << ','
            << fmt_double(dr.metrics.ttft_s) << ',' << fmt_double(dr.metrics.carbon_kg)
            << ',' << fmt_double(dr.metrics.water_l) << ','
            << fmt_double(dr.metrics.cost_usd) << ',' << fmt_double(dr.e_it_kwh) << ','
            << dr.queued << ',' << dr.sla_violations << '\n';
    }
}

}  // namespace marlin
