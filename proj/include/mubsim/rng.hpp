// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_RNG_HPP
#define MUBSIM_RNG_HPP

#include <armadillo>
#include <cmath>
#include <cstdint>
#include <random>

namespace mubsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic per-stream RNG. Streams derived from (seed, stream_id) are
/// independent for distinct ids, so Monte Carlo trials can run concurrently
/// and still reproduce bit-identical results in any execution order.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : eng_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id * 0xA24BAED4963EE407ULL + 1))) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform index in [0, n)
    arma::uword uniform_index(arma::uword n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t u;
        do {
            u = next_u64();
        } while (u >= limit);
        return static_cast<arma::uword>(u % n);
    }

    /// Standard normal via Box-Muller (second value cached)
    double gauss() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * arma::datum::pi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    /// Matrix of i.i.d. CN(0,1) entries (unit variance per complex entry)
    arma::cx_mat cgauss(arma::uword rows, arma::uword cols) {
        arma::cx_mat out(rows, cols);
        const double s = 1.0 / std::sqrt(2.0);
        for (arma::uword c = 0; c < cols; ++c)
            for (arma::uword r = 0; r < rows; ++r)
                out(r, c) = std::complex<double>(s * gauss(), s * gauss());
        return out;
    }

    /// K distinct indices from [0, n), order of first pick preserved
    std::vector<arma::uword> sample_without_replacement(arma::uword n, arma::uword k) {
        std::vector<arma::uword> pool(n);
        for (arma::uword i = 0; i < n; ++i)
            pool[i] = i;
        std::vector<arma::uword> out;
        out.reserve(k);
        for (arma::uword i = 0; i < k; ++i) {
            const arma::uword j = i + uniform_index(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

  private:
    std::mt19937_64 eng_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace mubsim

#endif
