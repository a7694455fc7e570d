#pragma once

#include <span>
#include <vector>

#include "marlin/core/types.hpp"

namespace marlin {

// Non-dominated set of metric vectors (all objectives minimized).
class ParetoFront {
  public:
    // Dominance-pruning insert; returns false when m is dominated by (or
    // equal to) an existing point.
    bool insert(const MetricsVector& m);

    const std::vector<MetricsVector>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

  private:
    std::vector<MetricsVector> points_;
};

// Dominated 4-D hypervolume of the front against a reference point that every
// point must weakly precede (throws otherwise). Callers normalize points to
// [0,1]^4 against the worst observed metrics and pass the unit reference, so
// volumes are comparable across experiments. Exact: inclusion-exclusion for
// small fronts, recursive objective slicing beyond.
double hypervolume(std::span<const MetricsVector> points,
                   const MetricsVector& reference);
double hypervolume(const ParetoFront& front, const MetricsVector& reference);

// Component-wise maximum over point sets; the conventional reference point.
MetricsVector worst_point(std::span<const MetricsVector> points);

// points scaled to [0,1]^4 by the reference (reference must be positive).
std::vector<MetricsVector> normalize_points(std::span<const MetricsVector> points,
                                            const MetricsVector& reference);

}  // namespace marlin
