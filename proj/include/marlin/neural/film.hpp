#pragma once

#include <span>
#include <vector>

#include "marlin/neural/mlp.hpp"

namespace marlin {

// Conditioning network that maps a context vector (datacenter attributes plus
// the workload forecast) to one (scale, shift) pair per modulated hidden
// layer. Scales are emitted as 1 + delta so a zero-initialized generator
// starts at the identity modulation.
class FilmGenerator {
  public:
    FilmGenerator() = default;
    FilmGenerator(int context_dim, std::vector<int> modulated_widths, int hidden,
                  Rng& rng);

    int context_dim() const { return net_.input_dim(); }
    const std::vector<int>& modulated_widths() const { return modulated_widths_; }

    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }

    FilmSignal generate(std::span<const double> context,
                        Mlp::Cache* cache = nullptr) const;

    // Accumulates generator parameter gradients from per-layer dL/dgamma and
    // dL/dbeta (as produced by Mlp::backward on the modulated network).
    void backward(const Mlp::Cache& cache, const FilmSignal& signal_grads);

  private:
    std::vector<int> modulated_widths_;
    Mlp net_;
};

}  // namespace marlin
