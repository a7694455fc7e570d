#include "marlin/neural/mlp.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace marlin {

Mlp::Mlp(std::vector<int> widths, Rng& rng) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 widths");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        w_off_.push_back(total);
        total += static_cast<std::size_t>(widths_[l + 1]) * widths_[l];
        b_off_.push_back(total);
        total += widths_[l + 1];
    }
    params_.resize(total);
    grads_.assign(total, 0.0);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        const int fan_in = widths_[l];
        const bool head = (l + 2 == widths_.size());
        const double scale = std::sqrt((head ? 1.0 : 2.0) / fan_in);
        const std::size_t n = static_cast<std::size_t>(widths_[l + 1]) * fan_in;
        for (std::size_t i = 0; i < n; ++i)
            params_[w_off_[l] + i] = scale * rng.normal();
        // Biases start at zero.
    }
}

void Mlp::zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

std::vector<double> Mlp::forward(std::span<const double> x, Cache* cache,
                                 const FilmSignal* film) const {
    if (static_cast<int>(x.size()) != input_dim())
        throw std::invalid_argument("Mlp forward: input dimension mismatch");
    if (film && !film->empty() &&
        static_cast<int>(film->gamma.size()) != num_hidden())
        throw std::invalid_argument("Mlp forward: film layer count mismatch");

    const int layers = static_cast<int>(widths_.size()) - 1;
    std::vector<double> a(x.begin(), x.end());
    if (cache) {
        cache->input = a;
        cache->z.assign(layers, {});
        cache->act.assign(layers > 1 ? layers - 1 : 0, {});
        if (film)
            cache->film = *film;
        else
            cache->film = FilmSignal{};
    }

    for (int l = 0; l < layers; ++l) {
        const int in = widths_[l];
        const int out = widths_[l + 1];
        std::vector<double> z(out);
        const double* w = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        for (int o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * a[i];
            z[o] = acc;
        }
        if (cache) cache->z[l] = z;
        if (l + 1 == layers) {
            a = std::move(z);  // linear head
        } else {
            std::vector<double> h(out);
            const bool mod = film && !film->empty();
            for (int o = 0; o < out; ++o) {
                const double r = z[o] > 0.0 ? z[o] : 0.0;
                h[o] = mod ? film->gamma[l][o] * r + film->beta[l][o] : r;
            }
            if (cache) cache->act[l] = h;
            a = std::move(h);
        }
    }
    return a;
}

std::vector<double> Mlp::backward(const Cache& cache, std::span<const double> dy,
                                  FilmSignal* film_grads, bool accumulate) {
    const int layers = static_cast<int>(widths_.size()) - 1;
    if (static_cast<int>(dy.size()) != output_dim())
        throw std::invalid_argument("Mlp backward: output dimension mismatch");
    const bool mod = !cache.film.empty();
    if (film_grads) {
        film_grads->gamma.assign(layers - 1, {});
        film_grads->beta.assign(layers - 1, {});
    }

    std::vector<double> dz(dy.begin(), dy.end());  // dL/dz of the head
    for (int l = layers - 1; l >= 0; --l) {
        const int in = widths_[l];
        const int out = widths_[l + 1];
        const std::vector<double>& a_in =
            l == 0 ? cache.input : cache.act[l - 1];
        const double* w = params_.data() + w_off_[l];
        if (accumulate) {
            double* gw = grads_.data() + w_off_[l];
            double* gb = grads_.data() + b_off_[l];
            for (int o = 0; o < out; ++o) {
                double* grow = gw + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) grow[i] += dz[o] * a_in[i];
                gb[o] += dz[o];
            }
        }
        std::vector<double> da(in, 0.0);
        for (int o = 0; o < out; ++o) {
            const double* row = w + static_cast<std::size_t>(o) * in;
            const double g = dz[o];
            for (int i = 0; i < in; ++i) da[i] += row[i] * g;
        }
        if (l == 0) return da;

        // Through the hidden activation of layer l-1.
        const std::vector<double>& z_prev = cache.z[l - 1];
        std::vector<double> dz_prev(in);
        for (int i = 0; i < in; ++i) {
            const double r = z_prev[i] > 0.0 ? z_prev[i] : 0.0;
            double dr = da[i];
            if (mod) {
                if (film_grads) {
                    if (film_grads->gamma[l - 1].empty()) {
                        film_grads->gamma[l - 1].assign(in, 0.0);
                        film_grads->beta[l - 1].assign(in, 0.0);
                    }
                    film_grads->gamma[l - 1][i] += da[i] * r;
                    film_grads->beta[l - 1][i] += da[i];
                }
                dr = da[i] * cache.film.gamma[l - 1][i];
            }
            dz_prev[i] = z_prev[i] > 0.0 ? dr : 0.0;
        }
        dz = std::move(dz_prev);
    }
    return {};  // unreachable
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("Adam: size mismatch");
    ++steps_;
    const double bc1 = 1.0 - std::pow(beta1_, steps_);
    const double bc2 = 1.0 - std::pow(beta2_, steps_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

double max_relative_gradient_error(std::vector<double>& params,
                                   std::span<const double> analytic,
                                   const std::function<double()>& loss, double h) {
    if (params.size() != analytic.size())
        throw std::invalid_argument("gradient check: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss();
        params[i] = saved - h;
        const double down = loss();
        params[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({1.0, std::abs(fd), std::abs(analytic[i])});
        worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
    }
    return worst;
}

}  // namespace marlin
