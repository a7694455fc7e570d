#include "marlin/game/simplex.hpp"

#include <algorithm>
#include <stdexcept>

namespace marlin {

std::vector<double> project_simplex(std::span<const double> v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) throw std::invalid_argument("project_simplex: empty vector");
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0;
    double tau = 0.0;
    int rho = 0;
    for (int k = 0; k < n; ++k) {
        css += u[k];
        const double candidate = (css - 1.0) / (k + 1);
        if (u[k] - candidate > 0.0) {
            rho = k + 1;
            tau = candidate;
        }
    }
    (void)rho;
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = std::max(v[i] - tau, 0.0);
    return p;
}

void project_rows(std::vector<double>& flat, int rows, int dim) {
    if (static_cast<int>(flat.size()) != rows * dim)
        throw std::invalid_argument("project_rows: size mismatch");
    for (int r = 0; r < rows; ++r) {
        const std::span<const double> row(flat.data() + static_cast<std::size_t>(r) * dim,
                                          static_cast<std::size_t>(dim));
        auto p = project_simplex(row);
        std::copy(p.begin(), p.end(), flat.begin() + static_cast<std::size_t>(r) * dim);
    }
}

std::vector<double> project_simplex_backward(std::span<const double> p,
                                             std::span<const double> d_p) {
    if (p.size() != d_p.size())
        throw std::invalid_argument("projection backward: size mismatch");
    const int n = static_cast<int>(p.size());
    double active_sum = 0.0;
    int active = 0;
    for (int i = 0; i < n; ++i) {
        if (p[i] > 0.0) {
            active_sum += d_p[i];
            ++active;
        }
    }
    std::vector<double> d_v(n, 0.0);
    if (active == 0) return d_v;
    const double mean = active_sum / active;
    for (int i = 0; i < n; ++i)
        if (p[i] > 0.0) d_v[i] = d_p[i] - mean;
    return d_v;
}

namespace {

// Pre-projection gain. A row hits the one-hot corner once the winning
// coordinate leads the others by 1/kPreScale, so corners are expressible at
// moderate |squashed| instead of requiring tanh saturation; s = 0 still maps
// to the uniform row.
constexpr double kPreScale = 1.5;

}  // namespace

std::vector<double> PlanActionMap::apply(std::span<const double> squashed) const {
    if (static_cast<int>(squashed.size()) != rows_ * dim_)
        throw std::invalid_argument("PlanActionMap: size mismatch");
    std::vector<double> plan(squashed.size());
    const double uniform = 1.0 / dim_;
    for (std::size_t i = 0; i < squashed.size(); ++i)
        plan[i] = kPreScale * squashed[i] + uniform;
    project_rows(plan, rows_, dim_);
    return plan;
}

std::vector<double> PlanActionMap::backward(std::span<const double> squashed,
                                            std::span<const double> mapped,
                                            std::span<const double> d_mapped) const {
    (void)squashed;
    std::vector<double> d(static_cast<std::size_t>(rows_) * dim_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        const std::size_t off = static_cast<std::size_t>(r) * dim_;
        const std::span<const double> p(mapped.data() + off,
                                        static_cast<std::size_t>(dim_));
        const std::span<const double> g(d_mapped.data() + off,
                                        static_cast<std::size_t>(dim_));
        const auto d_row = project_simplex_backward(p, g);
        for (int i = 0; i < dim_; ++i) d[off + i] = kPreScale * d_row[i];
    }
    return d;
}

}  // namespace marlin
