// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic complex-vector primitives: unitary DFT pair, block
// interleaving, PAPR, and the seeded random sources used by every trial.

#include <cmath>
#include <random>

#include "jsac/common.hpp"
#include "jsac/fft.hpp"

namespace jsac {

/// Unitary DFT (1/sqrt(L) both directions). inverse=true applies the IDFT.
inline cvec unitary_dft(const cvec& v, bool inverse = false) {
    require(!v.empty(), "unitary_dft: empty input");
    cvec out = v;
    detail::unitary_fft_inplace(out, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    return out;
}

/// Interleaves N equal-length blocks: output[k*N + b] = blocks[b][k], so block
/// b occupies positions {b, b+N, b+2N, ...} of the combined vector.
inline cvec block_interleave(const std::vector<cvec>& blocks) {
    require(!blocks.empty(), "block_interleave: no blocks");
    const std::size_t n = blocks.size();
    const std::size_t m = blocks[0].size();
    for (const auto& b : blocks)
        require(b.size() == m, "block_interleave: ragged block lengths");
    cvec out(n * m);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t k = 0; k < m; ++k) out[k * n + b] = blocks[b][k];
    return out;
}

inline std::vector<cvec> block_deinterleave(const cvec& v, std::size_t n_blocks) {
    require(n_blocks > 0 && v.size() % n_blocks == 0, "block_deinterleave: bad block count");
    const std::size_t m = v.size() / n_blocks;
    std::vector<cvec> blocks(n_blocks, cvec(m));
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t k = 0; k < m; ++k) blocks[b][k] = v[k * n_blocks + b];
    return blocks;
}

inline double mean_power(const cvec& v) {
    double acc = 0.0;
    for (const auto& x : v) acc += std::norm(x);
    return acc / static_cast<double>(v.size());
}

/// Peak-to-average power ratio in dB.
inline double papr_db(const cvec& v) {
    require(!v.empty(), "papr_db: empty input");
    double peak = 0.0;
    for (const auto& x : v) peak = std::max(peak, std::norm(x));
    const double mean = mean_power(v);
    require(mean > 0.0, "papr_db: all-zero input");
    return 10.0 * std::log10(peak / mean);
}

/// splitmix64 step; used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4ecb1f55a4275ULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = base;
    splitmix64(s);
    s ^= 0x517cc1b727220a95ULL * (a + 1);
    splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (b + 1);
    return splitmix64(s);
}

/// Seeded source for all randomness in a trial.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    long long uniform_int(long long lo, long long hi) {  // inclusive
        return std::uniform_int_distribution<long long>(lo, hi)(gen_);
    }

    double gaussian() { return normal_(gen_); }

    /// Circularly-symmetric complex Gaussian with E|x|^2 = variance.
    cplx cgaussian(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        return {s * normal_(gen_), s * normal_(gen_)};
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace jsac
