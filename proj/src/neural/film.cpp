#include "marlin/neural/film.hpp"

#include <numeric>
#include <stdexcept>

namespace marlin {

FilmGenerator::FilmGenerator(int context_dim, std::vector<int> modulated_widths,
                             int hidden, Rng& rng)
    : modulated_widths_(std::move(modulated_widths)) {
    const int total =
        std::accumulate(modulated_widths_.begin(), modulated_widths_.end(), 0);
    net_ = Mlp({context_dim, hidden, 2 * total}, rng);
}

FilmSignal FilmGenerator::generate(std::span<const double> context,
                                   Mlp::Cache* cache) const {
    const auto raw = net_.forward(context, cache);
    FilmSignal sig;
    sig.gamma.reserve(modulated_widths_.size());
    sig.beta.reserve(modulated_widths_.size());
    std::size_t pos = 0;
    for (int width : modulated_widths_) {
        std::vector<double> g(width), b(width);
        for (int i = 0; i < width; ++i) g[i] = 1.0 + raw[pos + i];
        pos += width;
        for (int i = 0; i < width; ++i) b[i] = raw[pos + i];
        pos += width;
        sig.gamma.push_back(std::move(g));
        sig.beta.push_back(std::move(b));
    }
    return sig;
}

void FilmGenerator::backward(const Mlp::Cache& cache,
                             const FilmSignal& signal_grads) {
    if (signal_grads.gamma.size() != modulated_widths_.size())
        throw std::invalid_argument("film backward: layer count mismatch");
    std::vector<double> draw(static_cast<std::size_t>(net_.output_dim()), 0.0);
    std::size_t pos = 0;
    for (std::size_t l = 0; l < modulated_widths_.size(); ++l) {
        const int width = modulated_widths_[l];
        if (!signal_grads.gamma[l].empty())
            for (int i = 0; i < width; ++i) draw[pos + i] = signal_grads.gamma[l][i];
        pos += width;
        if (!signal_grads.beta[l].empty())
            for (int i = 0; i < width; ++i) draw[pos + i] = signal_grads.beta[l][i];
        pos += width;
    }
    net_.backward(cache, draw);
}

}  // namespace marlin
