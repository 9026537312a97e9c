// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "jsac/common.hpp"

namespace jsac {

enum class ChirpDirection { Up, Down };

/// Checks that the sampled chirp is exactly M-sparse in the DFT-spread grid.
/// The per-block Gauss sum collapses to a delta only when (M/2)*n*(n-1) is a
/// multiple of N for all n, which reduces to N | M. Other grids leave the
/// chirp smeared over more than M entries and are rejected.
inline bool chirp_sparsity_compatible(std::size_t m, std::size_t n) {
    if (m % 2 != 0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (((m / 2) * i * (i - 1)) % n != 0) return false;
    }
    return true;
}

/// All grid/power/timing parameters of the SC-IFDM-FMCW waveform.
struct WaveformParams {
    std::size_t m = 32;            // samples per DFT block
    std::size_t n = 32;            // number of DFT blocks
    std::size_t l_cp = 8;          // cyclic prefix length, samples
    double bandwidth_hz = 200e6;   // sweep/sample bandwidth B
    double carrier_hz = 77e9;      // f_c
    double psi = 10.0;             // chirp/pilot power per occupied grid entry
    double sigma_d2 = 1.0;         // data symbol power
    std::size_t qam_order = 4;
    std::size_t symbols = 100;     // S, SC-IFDM symbols per frame
    bool cp_phase_shift = true;    // per-symbol chirp shift keeping the chirp continuous
    std::vector<ChirpDirection> chirp_schedule;  // length S; default: S/2 up then S/2 down

    std::size_t mn() const { return m * n; }
    std::size_t symbol_len() const { return mn() + l_cp; }
    double sample_period_s() const { return 1.0 / bandwidth_hz; }
    double symbol_duration_s() const { return symbol_len() * sample_period_s(); }
    double chirp_duration_s() const { return mn() * sample_period_s(); }
    /// Chirp rate eta = B / T_c = B^2 / MN (Hz/s).
    double chirp_rate() const { return bandwidth_hz * bandwidth_hz / static_cast<double>(mn()); }
    double range_bin_m() const {
        // fast-time DFT runs over the CP-inclusive window, hence the MN/(MN+Lcp) factor
        return kSpeedOfLight / (2.0 * bandwidth_hz) * static_cast<double>(mn()) /
               static_cast<double>(symbol_len());
    }
    double unambiguous_range_m() const {
        return static_cast<double>(mn()) * kSpeedOfLight / (2.0 * bandwidth_hz);
    }
    std::size_t bits_per_symbol() const {
        std::size_t b = 0;
        for (std::size_t q = qam_order; q > 1; q >>= 1) ++b;
        return b;
    }
    /// Data entries per SC-IFDM symbol (chirp occupies M of the MN positions).
    std::size_t data_per_symbol() const { return mn() - m; }

    std::vector<ChirpDirection> schedule() const {
        if (!chirp_schedule.empty()) return chirp_schedule;
        std::vector<ChirpDirection> sched(symbols, ChirpDirection::Up);
        for (std::size_t i = symbols / 2; i < symbols; ++i) sched[i] = ChirpDirection::Down;
        return sched;
    }

    void validate() const {
        require(m >= 1 && n >= 1 && symbols >= 1, "params: M, N, S must be >= 1");
        require(m % 2 == 0, "params: M must be even");
        require(l_cp < mn(), "params: L_cp must be < MN");
        require(chirp_sparsity_compatible(m, n),
                "params: chirp is not M-sparse on this (M,N) grid; N must divide M");
        require(psi >= 0.0, "params: psi must be >= 0");
        require(sigma_d2 > 0.0, "params: sigma_d2 must be > 0");
        require(qam_order >= 2 && (qam_order & (qam_order - 1)) == 0,
                "params: QAM order must be a power of two");
        require(bandwidth_hz > 0.0 && carrier_hz > 0.0, "params: B and f_c must be positive");
        if (!chirp_schedule.empty())
            require(chirp_schedule.size() == symbols, "params: chirp schedule length != S");
    }

    /// Channel estimation needs at least one chirp of each direction.
    bool has_both_directions() const {
        bool up = false, down = false;
        for (auto d : schedule()) (d == ChirpDirection::Up ? up : down) = true;
        return up && down;
    }
};

}  // namespace jsac
