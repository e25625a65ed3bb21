#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace newsct {

// Deterministic RNG used everywhere. Distribution sampling is hand-rolled on
// top of mt19937_64 so that sampled values do not depend on the standard
// library's unspecified <random> distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        // rejection-free modulo is biased for huge n; n here is always small
        // compared to 2^64 so the bias is negligible, but keep it exact anyway
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do { x = gen_(); } while (x >= limit);
        return x % n;
    }

    // index sampled proportionally to weights (need not be normalised)
    std::size_t next_categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    // index sampled from a cumulative weight table (strictly increasing)
    std::size_t next_from_cdf(std::span<const double> cdf) {
        double u = next_double() * cdf.back();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        return i < cdf.size() ? i : cdf.size() - 1;
    }

    double next_gaussian() {
        // Box-Muller, one value per call
        double u1, u2;
        do { u1 = next_double(); } while (u1 <= 0.0);
        u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Marsaglia-Tsang; handles shape < 1 via the boost trick
    double next_gamma(double shape) {
        if (shape < 1.0) {
            double u;
            do { u = next_double(); } while (u <= 0.0);
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_gaussian();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    std::vector<double> next_dirichlet(std::size_t n, double concentration) {
        std::vector<double> out(n);
        double total = 0.0;
        for (auto& x : out) { x = next_gamma(concentration); total += x; }
        if (total <= 0.0) {
            for (auto& x : out) x = 1.0 / static_cast<double>(n);
        } else {
            for (auto& x : out) x /= total;
        }
        return out;
    }

private:
    std::mt19937_64 gen_;
};

// Stable stream splitting: derive an independent seed from (seed, tag).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace newsct
