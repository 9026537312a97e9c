// SPDX-License-Identifier: Apache-2.0
#pragma once

// Transmit side: SC-IFDM modulation, discrete FMCW chirps, the M-sparse
// DFT-domain chirp representation, combined-frame assembly, and CP insertion
// with the per-symbol chirp shift that keeps the chirp continuous over the
// CP-extended frame.

#include <cmath>
#include <cstdlib>

#include "jsac/common.hpp"
#include "jsac/numerics.hpp"
#include "jsac/params.hpp"

namespace jsac {

/// Chirp sample exp(+-j*pi*x^2/MN) with signed integer argument. MN even
/// makes this MN-periodic, so shifts can be folded freely.
inline cplx chirp_sample(long long x, std::size_t mn, ChirpDirection dir) {
    const long long xm = mod(x, static_cast<long long>(mn));
    double phase = kPi * static_cast<double>(xm) * static_cast<double>(xm) /
                   static_cast<double>(mn);
    if (dir == ChirpDirection::Down) phase = -phase;
    return {std::cos(phase), std::sin(phase)};
}

/// Critically sampled FMCW pulse, sample p = exp(+-j*pi*(p-shift)^2/MN).
inline cvec chirp_time(ChirpDirection dir, const WaveformParams& params, long long shift = 0) {
    const std::size_t mn = params.mn();
    cvec out(mn);
    for (std::size_t p = 0; p < mn; ++p)
        out[p] = chirp_sample(static_cast<long long>(p) - shift, mn, dir);
    return out;
}

/// One nonzero entry of the DFT-domain chirp: grid position and value.
struct SparseChirpEntry {
    std::size_t row;  // k
    std::size_t col;  // l
    cplx value;
};

/// Exact DFT-domain image of a unit-power time chirp: M entries, one per
/// column, each of magnitude sqrt(N).
struct SparseChirpMap {
    std::vector<SparseChirpEntry> entries;  // exactly M, ordered by column
    ChirpDirection direction = ChirpDirection::Up;
    long long cp_shift = 0;  // signed sample shift baked into the map
};

/// Row index occupied by the chirp in column l for a given shift.
inline std::size_t chirp_row(std::size_t l, long long shift, const WaveformParams& params,
                             ChirpDirection dir) {
    const long long m2 = static_cast<long long>(params.m) / 2;
    const long long nn = static_cast<long long>(params.n);
    const long long ll = static_cast<long long>(l);
    if (dir == ChirpDirection::Up) return static_cast<std::size_t>(mod(m2 + ll - shift, nn));
    return static_cast<std::size_t>(mod(shift - m2 - ll, nn));
}

/// Signed per-symbol chirp shift. Advancing symbol i's chirp by i*L_cp makes
/// the concatenated CP-extended chirp continuous (each window then reads
/// chirp(t - L_cp) in absolute frame time).
inline long long symbol_cp_shift(std::size_t symbol_index, const WaveformParams& params) {
    if (!params.cp_phase_shift) return 0;
    return -static_cast<long long>(symbol_index) * static_cast<long long>(params.l_cp);
}

inline SparseChirpMap chirp_dft_sparse(ChirpDirection dir, const WaveformParams& params,
                                       std::size_t symbol_index) {
    params.validate();
    require(symbol_index < params.symbols, "chirp_dft_sparse: symbol index out of range");
    const long long shift = symbol_cp_shift(symbol_index, params);
    const std::size_t mn = params.mn();
    const double root_n = std::sqrt(static_cast<double>(params.n));
    SparseChirpMap map;
    map.direction = dir;
    map.cp_shift = shift;
    map.entries.reserve(params.m);
    for (std::size_t l = 0; l < params.m; ++l) {
        const std::size_t k = chirp_row(l, shift, params, dir);
        const double w = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(l) /
                         static_cast<double>(mn);
        const cplx omega{std::cos(w), std::sin(w)};
        const cplx v = root_n * chirp_sample(static_cast<long long>(l) - shift, mn, dir) * omega;
        map.entries.push_back({k, l, v});
    }
    return map;
}

inline ComplexGrid densify(const SparseChirpMap& map, const WaveformParams& params) {
    ComplexGrid grid(params.n, params.m);
    for (const auto& e : map.entries) grid(e.row, e.col) = e.value;
    return grid;
}

/// SC-IFDM modulation: per-column N-point combination of Eq-form
/// s(l+nM) = (1/sqrt(N)) sum_k X(k,l) exp(j2pi k(l+nM)/MN).
inline cvec scifdm_modulate(const ComplexGrid& grid, const WaveformParams& params) {
    require(grid.rows == params.n && grid.cols == params.m, "scifdm_modulate: grid is not NxM");
    const std::size_t mn = params.mn();
    cvec out(mn);
    cvec col(params.n);
    for (std::size_t l = 0; l < params.m; ++l) {
        for (std::size_t k = 0; k < params.n; ++k) {
            const double w = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(l) /
                             static_cast<double>(mn);
            col[k] = grid(k, l) * cplx{std::cos(w), std::sin(w)};
        }
        detail::unitary_fft_inplace(col, FFTW_BACKWARD);
        for (std::size_t n = 0; n < params.n; ++n) out[l + n * params.m] = col[n];
    }
    return out;
}

inline ComplexGrid scifdm_demodulate(const cvec& signal, const WaveformParams& params) {
    require(signal.size() == params.mn(), "scifdm_demodulate: signal length != MN");
    ComplexGrid grid(params.n, params.m);
    cvec col(params.n);
    for (std::size_t l = 0; l < params.m; ++l) {
        for (std::size_t n = 0; n < params.n; ++n) col[n] = signal[l + n * params.m];
        detail::unitary_fft_inplace(col, FFTW_FORWARD);
        for (std::size_t k = 0; k < params.n; ++k) {
            const double w = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(l) /
                             static_cast<double>(params.mn());
            grid(k, l) = col[k] * cplx{std::cos(w), std::sin(w)};
        }
    }
    return grid;
}

/// Overlays the power-scaled chirp onto a data grid whose chirp positions are
/// zero. Combined entries carry sqrt(psi) * chirp-sample, matching the
/// per-entry pilot power psi the estimator's variance bound assumes.
inline ComplexGrid assemble_combined(const ComplexGrid& data_grid, const SparseChirpMap& chirp,
                                     const WaveformParams& params) {
    require(data_grid.rows == params.n && data_grid.cols == params.m,
            "assemble_combined: grid is not NxM");
    ComplexGrid out = data_grid;
    const double scale = std::sqrt(params.psi / static_cast<double>(params.n));
    for (const auto& e : chirp.entries) {
        require(std::abs(out(e.row, e.col)) == 0.0,
                "assemble_combined: data symbol found at a chirp position");
        out(e.row, e.col) = scale * e.value;
    }
    return out;
}

/// Grid positions available for data in one symbol, column-major, skipping
/// the chirp row of each column. Deterministic bit-to-position mapping.
inline std::vector<std::pair<std::size_t, std::size_t>> data_positions(
    const WaveformParams& params, std::size_t symbol_index, ChirpDirection dir) {
    const long long shift = symbol_cp_shift(symbol_index, params);
    std::vector<std::pair<std::size_t, std::size_t>> pos;
    pos.reserve(params.data_per_symbol());
    for (std::size_t l = 0; l < params.m; ++l) {
        const std::size_t kc = chirp_row(l, shift, params, dir);
        for (std::size_t k = 0; k < params.n; ++k)
            if (k != kc) pos.emplace_back(k, l);
    }
    return pos;
}

/// Contiguous complex baseband at rate B, CP included.
struct TimeDomainStream {
    cvec samples;
    double sample_rate_hz = 0.0;
    std::vector<std::size_t> symbol_starts;  // index of each symbol's CP start
};

/// Concatenates S symbols, each scifdm_modulate(grid) prefixed by its last
/// L_cp samples.
inline TimeDomainStream build_frame(const std::vector<ComplexGrid>& grids,
                                    const WaveformParams& params) {
    require(grids.size() == params.symbols, "build_frame: wrong grid count");
    TimeDomainStream stream;
    stream.sample_rate_hz = params.bandwidth_hz;
    stream.samples.reserve(params.symbols * params.symbol_len());
    for (std::size_t i = 0; i < params.symbols; ++i) {
        const cvec body = scifdm_modulate(grids[i], params);
        stream.symbol_starts.push_back(stream.samples.size());
        stream.samples.insert(stream.samples.end(), body.end() - params.l_cp, body.end());
        stream.samples.insert(stream.samples.end(), body.begin(), body.end());
    }
    return stream;
}

/// Plain MN-point unitary IDFT of the flattened grid plus CP. PAPR baseline
/// only; carries no chirp.
inline cvec ofdm_modulate_baseline(const ComplexGrid& grid, const WaveformParams& params) {
    require(grid.rows == params.n && grid.cols == params.m,
            "ofdm_modulate_baseline: grid is not NxM");
    cvec tones = grid.data;
    detail::unitary_fft_inplace(tones, FFTW_BACKWARD);
    cvec out;
    out.reserve(params.symbol_len());
    out.insert(out.end(), tones.end() - params.l_cp, tones.end());
    out.insert(out.end(), tones.begin(), tones.end());
    return out;
}

}  // namespace jsac
