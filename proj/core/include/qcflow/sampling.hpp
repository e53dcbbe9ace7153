#pragma once

#include <cmath>
#include <cstdint>

#include "qcflow/types.hpp"

namespace qcflow {

/// Small counter-based RNG (splitmix64).  Used instead of <random>
/// distributions so that streams are reproducible independently of the
/// standard library implementation, and so that per-sample substreams can
/// be derived from (seed, index) pairs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed * 0x9E3779B97F4A7C15ULL + 1) {}

    /// Substream for sample index i of the stream with the given seed.
    static Rng substream(std::uint64_t seed, std::uint64_t i) {
        Rng r(seed);
        r.state_ ^= (i + 1) * 0xBF58476D1CE4E5B9ULL;
        r.next_u64();
        return r;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Uniform direction on the unit sphere in R^n.
    Vec sphere(int n) {
        Vec v(n);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < n; ++i) v[i] = gaussian();
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-24);
        return v / std::sqrt(norm2);
    }

private:
    std::uint64_t state_;
};

/// Halton low-discrepancy sequence mapped into a box; index-addressable so
/// point sets with more samples are supersets of smaller ones.
class HaltonBox {
public:
    explicit HaltonBox(DomainBox box) : box_(std::move(box)) {}

    Vec point(std::uint64_t index) const {
        static constexpr int primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                         23, 29, 31, 37, 41, 43, 47, 53};
        const int n = box_.dim();
        if (n > 16) throw DegenerateInputError("Halton sampler limited to n <= 16");
        Vec x(n);
        for (int d = 0; d < n; ++d) {
            double u = radical_inverse(index + 1, primes[d]);
            x[d] = box_.lo[d] + u * (box_.hi[d] - box_.lo[d]);
        }
        return x;
    }

private:
    static double radical_inverse(std::uint64_t i, int base) {
        double inv = 1.0 / base, f = inv, r = 0.0;
        while (i) {
            r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
            i /= static_cast<std::uint64_t>(base);
            f *= inv;
        }
        return r;
    }

    DomainBox box_;
};

}  // namespace qcflow
