#pragma once

#include <span>
#include <vector>

#include "marlin/neural/sac.hpp"

namespace marlin {

// Euclidean projection of v onto the probability simplex
// {p : p_i >= 0, sum p_i = 1} via the sorting method.
std::vector<double> project_simplex(std::span<const double> v);

// In-place projection of every row of a flat (rows x dim) tensor.
void project_rows(std::vector<double>& flat, int rows, int dim);

// Backward of the projection at output p: the projection is locally an
// affine map onto the active set S = {i : p_i > 0}, so incoming gradients
// are recentered over S and zeroed elsewhere.
std::vector<double> project_simplex_backward(std::span<const double> p,
                                             std::span<const double> d_p);

// Action map installed into the SAC agents: each squashed sample in (-1,1)
// is rescaled around the uniform share (s = 0 maps every row to uniform) and
// each plan row is projected onto the simplex. The pre-projection scale is
// wide enough that single-datacenter corners are reachable without saturating
// the tanh squash, so the policy can both sample and express concentrated
// plans.
class PlanActionMap : public ActionMap {
  public:
    PlanActionMap(int rows, int dim) : rows_(rows), dim_(dim) {}

    std::vector<double> apply(std::span<const double> squashed) const override;
    std::vector<double> backward(std::span<const double> squashed,
                                 std::span<const double> mapped,
                                 std::span<const double> d_mapped) const override;

    int rows() const { return rows_; }
    int dim() const { return dim_; }

  private:
    int rows_;
    int dim_;
};

}  // namespace marlin
