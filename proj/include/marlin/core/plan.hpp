#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlin {

inline constexpr double kSimplexTol = 1e-9;

// Routing-fraction tensor indexed (model_class, origin_region, datacenter).
// Every (model, region) row lives on the probability simplex over datacenters.
// Violating inputs are rejected at construction, never renormalized.
class SchedulingPlan {
public:
    SchedulingPlan() = default;

    // Uniform plan: every row is 1/D.
    static SchedulingPlan uniform(int models, int regions, int dcs) {
        SchedulingPlan p;
        p.models_ = models;
        p.regions_ = regions;
        p.dcs_ = dcs;
        p.routing_.assign(static_cast<std::size_t>(models) * regions * dcs,
                          1.0 / static_cast<double>(dcs));
        return p;
    }

    // Validating constructor from a flat row-major (model, region, dc) tensor.
    static SchedulingPlan from_routing(int models, int regions, int dcs,
                                       std::vector<double> routing) {
        if (routing.size() != static_cast<std::size_t>(models) * regions * dcs)
            throw std::invalid_argument("SchedulingPlan: routing tensor size mismatch");
        SchedulingPlan p;
        p.models_ = models;
        p.regions_ = regions;
        p.dcs_ = dcs;
        p.routing_ = std::move(routing);
        std::string err;
        if (!p.simplex_valid(&err)) throw std::invalid_argument("SchedulingPlan: " + err);
        return p;
    }

    int models() const { return models_; }
    int regions() const { return regions_; }
    int dcs() const { return dcs_; }
    std::size_t size() const { return routing_.size(); }
    bool empty() const { return routing_.empty(); }

    double at(int m, int r, int d) const { return routing_[index(m, r, d)]; }

    std::span<const double> row(int m, int r) const {
        return {routing_.data() + index(m, r, 0), static_cast<std::size_t>(dcs_)};
    }
    std::span<const double> flat() const { return routing_; }

    bool simplex_valid(std::string* why = nullptr, double tol = kSimplexTol) const {
        for (int m = 0; m < models_; ++m) {
            for (int r = 0; r < regions_; ++r) {
                double sum = 0.0;
                for (int d = 0; d < dcs_; ++d) {
                    const double v = at(m, r, d);
                    if (!(v >= 0.0) || !std::isfinite(v)) {
                        if (why)
                            *why = "negative or non-finite fraction at row (" +
                                   std::to_string(m) + "," + std::to_string(r) + ")";
                        return false;
                    }
                    sum += v;
                }
                if (std::abs(sum - 1.0) > tol) {
                    if (why)
                        *why = "row (" + std::to_string(m) + "," + std::to_string(r) +
                               ") sums to " + std::to_string(sum);
                    return false;
                }
            }
        }
        return true;
    }

private:
    std::size_t index(int m, int r, int d) const {
        return (static_cast<std::size_t>(m) * regions_ + r) * dcs_ + d;
    }

    int models_ = 0;
    int regions_ = 0;
    int dcs_ = 0;
    std::vector<double> routing_;
};

}  // namespace marlin
