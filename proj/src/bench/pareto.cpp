#include "marlin/bench/pareto.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace marlin {

bool ParetoFront::insert(const MetricsVector& m) {
    for (const auto& p : points_)
        if (dominates(p, m) || p.as_array() == m.as_array()) return false;
    std::erase_if(points_,
                  [&m](const MetricsVector& p) { return dominates(m, p); });
    points_.push_back(m);
    return true;
}

namespace {

using Point = std::array<double, kNumObjectives>;

// Dominance restricted to the first `dims` coordinates, all minimized.
bool dominates_prefix(const Point& a, const Point& b, int dims) {
    bool strict = false;
    for (int j = 0; j < dims; ++j) {
        if (a[j] > b[j]) return false;
        if (a[j] < b[j]) strict = true;
    }
    return strict;
}

void prune_prefix(std::vector<Point>& pts, int dims) {
    std::vector<Point> kept;
    kept.reserve(pts.size());
    for (const auto& p : pts) {
        bool covered = false;
        for (const auto& q : kept)
            if (dominates_prefix(q, p, dims) ||
                std::equal(q.begin(), q.begin() + dims, p.begin())) {
                covered = true;
                break;
            }
        if (covered) continue;
        std::erase_if(kept,
                      [&](const Point& q) { return dominates_prefix(p, q, dims); });
        kept.push_back(p);
    }
    pts = std::move(kept);
}

// Inclusion-exclusion over box unions: exact but 2^n, used for small fronts.
double hv_inclusion_exclusion(const std::vector<Point>& pts, const Point& ref) {
    const std::size_t n = pts.size();
    double total = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        Point corner{};
        corner.fill(-std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i))
                for (int j = 0; j < kNumObjectives; ++j)
                    corner[j] = std::max(corner[j], pts[i][j]);
        double vol = 1.0;
        for (int j = 0; j < kNumObjectives; ++j)
            vol *= std::max(0.0, ref[j] - corner[j]);
        total += (std::popcount(mask) % 2 == 1) ? vol : -vol;
    }
    return total;
}

// Objective slicing: sweep the last active dimension; each slab contributes
// (width x hypervolume of the accumulated points one dimension down).
double hv_slice(std::vector<Point> pts, const Point& ref, int dims) {
    if (pts.empty()) return 0.0;
    if (dims == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::min(best, p[0]);
        return ref[0] - best;
    }
    const int axis = dims - 1;
    std::sort(pts.begin(), pts.end(), [axis](const Point& a, const Point& b) {
        return a[axis] < b[axis];
    });
    double total = 0.0;
    std::vector<Point> slab;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        slab.push_back(pts[k]);
        const double lo = pts[k][axis];
        const double hi = (k + 1 < pts.size()) ? pts[k + 1][axis] : ref[axis];
        if (hi <= lo) continue;
        std::vector<Point> cross = slab;
        prune_prefix(cross, axis);
        total += (hi - lo) * hv_slice(std::move(cross), ref, axis);
    }
    return total;
}

}  // namespace

double hypervolume(std::span<const MetricsVector> points,
                   const MetricsVector& reference) {
    if (points.empty()) return 0.0;
    std::vector<Point> pts;
    pts.reserve(points.size());
    const Point ref = reference.as_array();
    for (const auto& m : points) {
        const Point p = m.as_array();
        for (int j = 0; j < kNumObjectives; ++j)
            if (p[j] > ref[j])
                throw std::invalid_argument(
                    "hypervolume: point exceeds the reference");
        pts.push_back(p);
    }
    prune_prefix(pts, kNumObjectives);
    if (pts.size() <= 20) return hv_inclusion_exclusion(pts, ref);
    return hv_slice(std::move(pts), ref, kNumObjectives);
}

double hypervolume(const ParetoFront& front, const MetricsVector& reference) {
    return hypervolume(std::span<const MetricsVector>(front.points()), reference);
}

MetricsVector worst_point(std::span<const MetricsVector> points) {
    MetricsVector w;
    for (const auto& m : points) {
        w.ttft_s = std::max(w.ttft_s, m.ttft_s);
        w.carbon_kg = std::max(w.carbon_kg, m.carbon_kg);
        w.water_l = std::max(w.water_l, m.water_l);
        w.cost_usd = std::max(w.cost_usd, m.cost_usd);
    }
    return w;
}

std::vector<MetricsVector> normalize_points(std::span<const MetricsVector> points,
                                            const MetricsVector& reference) {
    for (int j = 0; j < kNumObjectives; ++j)
        if (!(reference[j] > 0.0))
            throw std::invalid_argument("normalize_points: reference must be > 0");
    std::vector<MetricsVector> out;
    out.reserve(points.size());
    for (const auto& m : points)
        out.push_back({m.ttft_s / reference.ttft_s, m.carbon_kg / reference.carbon_kg,
                       m.water_l / reference.water_l, m.cost_usd / reference.cost_usd});
    return out;
}

}  // namespace marlin
