// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jsac {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// N x M complex grid: row k (block / Doppler index), column l (in-block index).
struct ComplexGrid {
    std::size_t rows = 0;  // N
    std::size_t cols = 0;  // M
    cvec data;             // row-major, rows*cols entries

    ComplexGrid() = default;
    ComplexGrid(std::size_t n, std::size_t m) : rows(n), cols(m), data(n * m) {}

    cplx& operator()(std::size_t k, std::size_t l) { return data[k * cols + l]; }
    const cplx& operator()(std::size_t k, std::size_t l) const { return data[k * cols + l]; }
};

[[noreturn]] inline void fail(const std::string& msg) { throw std::invalid_argument(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

/// Euclidean remainder, result in [0, m).
inline long long mod(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
}

/// Signed residue of a mod m in (-m/2, m/2].
inline long long signed_mod(long long a, long long m) {
    long long r = mod(a, m);
    return r > m / 2 ? r - m : r;
}

}  // namespace jsac
