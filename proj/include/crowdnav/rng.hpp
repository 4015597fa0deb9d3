#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace crowdnav {

/// splitmix64 finalizer; used to derive independent stream seeds from a base
/// seed plus a tag so that separate consumers never share a stream.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }

/// Deterministic random stream. The engine is the fully-specified mt19937_64
/// and all distributions are implemented here, so identical seeds give
/// byte-identical sequences regardless of the standard library build.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be positive.
    int uniform_int(int n) {
        const int v = static_cast<int>(uniform() * static_cast<double>(n));
        return v >= n ? n - 1 : v;
    }

    /// Standard normal via Box-Muller; the second value is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Zero-mean gaussian with rejection outside [-bound, bound].
    double truncated_gaussian(double sigma, double bound) {
        for (int i = 0; i < 64; ++i) {
            const double v = gaussian() * sigma;
            if (std::abs(v) <= bound) return v;
        }
        return 0.0;
    }

    /// Index draw proportional to nonnegative weights.
    int sample_discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        for (size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace crowdnav
