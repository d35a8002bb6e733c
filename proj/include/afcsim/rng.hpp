#ifndef AFCSIM_RNG_HPP
#define AFCSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

#include "afcsim/errors.hpp"

namespace afcsim {

// Counter-based deterministic generator (SplitMix64 finalizer).
//
// The i-th output is a pure function of (seed, stream label, i), so streams
// can be replayed and decorrelated substreams derived without any global
// state: key = mix(seed ^ mix(fnv1a(label))), output_i = splitmix64(key, i).
// Identical (seed, label) sequences are bit-exact across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::string_view stream_label = "")
        : key_(derive_key(seed, stream_label)) {}

    // Independent substream of the same seed.
    Rng stream(std::string_view label) const {
        Rng r(0);
        r.key_ = derive_key(key_, label);
        return r;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Box-Muller (cosine branch only; draws two uniforms per call).
    double gaussian(double mean = 0.0, double sigma = 1.0) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Poisson sample; multiplication method below mean 10, Hormann's PTRD
    // transformed rejection above.
    long long poisson(double mean) {
        if (!(mean >= 0.0)) throw ConfigError("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            long long k = -1;
            double p = 1.0;
            do {
                ++k;
                p *= uniform();
            } while (p > limit);
            return k;
        }
        const double smu = std::sqrt(mean);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            double u = uniform() - 0.5;
            double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
            const double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
            if (lhs <= rhs) return static_cast<long long>(kf);
        }
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view text) {
        std::uint64_t h = 14695981039346656037ull;
        for (char c : text) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return h;
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::string_view label) {
        return mix(seed ^ mix(fnv1a(label)));
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace afcsim

#endif
