#pragma once

#include <functional>
#include <span>
#include <vector>

#include "marlin/util/rng.hpp"

namespace marlin {

// Per-hidden-layer affine modulation: h = gamma * relu(z) + beta.
struct FilmSignal {
    std::vector<std::vector<double>> gamma;
    std::vector<std::vector<double>> beta;

    bool empty() const { return gamma.empty(); }
};

// Dense multi-layer perceptron with rectified-linear hidden layers, a linear
// head, and optional feature-wise modulation of hidden activations.
// Parameters and gradients live in single flat arrays (layer-major, row-major
// weights then biases) so optimizers, checkpoints, and finite-difference
// checks all see one contiguous vector.
class Mlp {
  public:
    Mlp() = default;
    Mlp(std::vector<int> widths, Rng& rng);

    int input_dim() const { return widths_.empty() ? 0 : widths_.front(); }
    int output_dim() const { return widths_.empty() ? 0 : widths_.back(); }
    int num_hidden() const { return static_cast<int>(widths_.size()) - 2; }
    const std::vector<int>& widths() const { return widths_; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& grads() { return grads_; }
    void zero_grads();

    // Activations recorded by one forward pass, consumed by backward.
    struct Cache {
        std::vector<double> input;
        std::vector<std::vector<double>> z;    // pre-activations, per layer
        std::vector<std::vector<double>> act;  // modulated hidden outputs
        FilmSignal film;                       // copy of the applied signal
    };

    // film, when given, must carry one (gamma, beta) pair per hidden layer.
    std::vector<double> forward(std::span<const double> x, Cache* cache = nullptr,
                                const FilmSignal* film = nullptr) const;

    // Backpropagates dL/dy; accumulates parameter gradients into grads()
    // unless accumulate is false; returns dL/dx. When film_grads is non-null
    // it receives dL/dgamma and dL/dbeta per hidden layer.
    std::vector<double> backward(const Cache& cache, std::span<const double> dy,
                                 FilmSignal* film_grads = nullptr,
                                 bool accumulate = true);

  private:
    std::vector<int> widths_;
    std::vector<double> params_;
    std::vector<double> grads_;
    // Flat offsets: weights of layer l at w_off_[l], biases at b_off_[l].
    std::vector<std::size_t> w_off_;
    std::vector<std::size_t> b_off_;
};

// Adaptive-moment gradient descent over one flat parameter vector.
class Adam {
  public:
    Adam() = default;
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    void step(std::vector<double>& params, const std::vector<double>& grads);
    double lr() const { return lr_; }

  private:
    double lr_ = 1e-3;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long steps_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

// Max relative error between an analytic gradient and central finite
// differences of loss() over params; h is the half-step.
double max_relative_gradient_error(std::vector<double>& params,
                                   std::span<const double> analytic,
                                   const std::function<double()>& loss,
                                   double h = 1e-5);

}  // namespace marlin
