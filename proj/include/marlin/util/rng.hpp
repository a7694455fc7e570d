#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace marlin {

// Deterministic 64-bit generator (xoshiro256**) with fixed-algorithm
// distributions. std::normal_distribution et al. are implementation-defined,
// which would break the bit-identical-runs guarantee across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 seeding
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            si = z ^ (z >> 31);
        }
    }

    // Derive an independent stream deterministically from a base seed and tags.
    static Rng stream(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
        return Rng(base * 0x9e3779b97f4a7c15ULL + tag_a * 0xbf58476d1ce4e5b9ULL +
                   tag_b * 0x94d049bb133111ebULL + 0x2545f4914f6cdd1dULL);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Standard normal via Box-Muller (fixed algorithm).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential(double rate) {
        double u = uniform();
        while (u <= 1e-300) u = uniform();
        return -std::log(u) / rate;
    }

    // Poisson: Knuth for small means, normal approximation above. The
    // approximation keeps large-volume trace generation O(1) per draw.
    long long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 64.0) {
            const double limit = std::exp(-mean);
            double p = 1.0;
            long long k = 0;
            do {
                ++k;
                p *= uniform();
            } while (p > limit);
            return k - 1;
        }
        const double v = std::round(mean + std::sqrt(mean) * normal());
        return v < 0.0 ? 0 : static_cast<long long>(v);
    }

    // Pareto with scale 1, shape alpha (heavy-tail spike multiplier).
    double pareto(double alpha) {
        double u = uniform();
        while (u <= 1e-300) u = uniform();
        return std::pow(u, -1.0 / alpha);
    }

    // Random point on the probability simplex (flat Dirichlet) of dim n.
    std::vector<double> dirichlet_flat(std::size_t n) {
        std::vector<double> out(n);
        double sum = 0.0;
        for (auto& v : out) {
            v = exponential(1.0);
            sum += v;
        }
        for (auto& v : out) v /= sum;
        return out;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace marlin
