// SPDX-License-Identifier: Apache-2.0
#pragma once

// Gray-coded square QAM mapping and hard-decision demapping.

#include <cmath>
#include <cstdint>

#include "jsac/common.hpp"

namespace jsac {

namespace detail {

inline std::uint32_t gray_encode(std::uint32_t b) { return b ^ (b >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

}  // namespace detail

/// Square Gray QAM with unit average power; order in {4, 16, 64, ...}.
class QamConstellation {
public:
    explicit QamConstellation(std::size_t order) : order_(order) {
        require(order >= 4 && (order & (order - 1)) == 0, "qam: order must be a power of two >= 4");
        bits_ = 0;
        for (std::size_t q = order; q > 1; q >>= 1) ++bits_;
        require(bits_ % 2 == 0, "qam: only square constellations supported");
        levels_ = std::size_t{1} << (bits_ / 2);
        // mean power of +-1, +-3, ..., +-(L-1) per axis
        scale_ = std::sqrt(3.0 / (2.0 * (static_cast<double>(levels_ * levels_) - 1.0)));
    }

    std::size_t bits_per_symbol() const { return bits_; }

    /// Maps bits_per_symbol() bits (MSB first: I axis then Q axis) to a symbol.
    cplx map(std::uint32_t bits) const {
        const std::uint32_t half = static_cast<std::uint32_t>(bits_ / 2);
        const std::uint32_t bi = bits >> half;
        const std::uint32_t bq = bits & ((1u << half) - 1u);
        return {axis_amp(bi), axis_amp(bq)};
    }

    /// Nearest-symbol hard decision, returns the bit label.
    std::uint32_t demap(cplx y) const {
        const std::uint32_t half = static_cast<std::uint32_t>(bits_ / 2);
        return (axis_slice(y.real()) << half) | axis_slice(y.imag());
    }

private:
    // level position p carries label gray_encode(p), so neighbours differ in one bit
    double axis_amp(std::uint32_t bits) const {
        const std::uint32_t pos = detail::gray_decode(bits);
        return scale_ * (2.0 * static_cast<double>(pos) - static_cast<double>(levels_ - 1));
    }

    std::uint32_t axis_slice(double v) const {
        double idx = std::round((v / scale_ + static_cast<double>(levels_ - 1)) / 2.0);
        idx = std::max(0.0, std::min(static_cast<double>(levels_ - 1), idx));
        return detail::gray_encode(static_cast<std::uint32_t>(idx));
    }

    std::size_t order_;
    std::size_t bits_;
    std::size_t levels_;
    double scale_;
};

}  // namespace jsac
