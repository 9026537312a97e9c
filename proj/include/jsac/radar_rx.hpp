// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mono-static radar receiver: dechirp against the transmitted reference,
// range-Doppler map via fast-time/slow-time transforms, peak detection, and
// up/down-chirp range-velocity resolution.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "jsac/channel.hpp"
#include "jsac/common.hpp"
#include "jsac/params.hpp"
#include "jsac/waveform.hpp"

namespace jsac {

struct DechirpedSymbol {
    cvec samples;  // CP-inclusive window, MN + L_cp samples
    ChirpDirection direction = ChirpDirection::Up;
    std::size_t symbol_index = 0;
};

/// Multiplies each CP-inclusive symbol window by the conjugate of the
/// transmitted chirp reference. No CP removal: the window reads
/// chirp(j - L_cp - shift_i), which the per-symbol shifts keep continuous.
inline std::vector<DechirpedSymbol> dechirp(const TimeDomainStream& rx,
                                            const WaveformParams& params) {
    const std::size_t win = params.symbol_len();
    require(rx.samples.size() == params.symbols * win, "dechirp: stream length mismatch");
    const auto sched = params.schedule();
    std::vector<DechirpedSymbol> out(params.symbols);
    for (std::size_t i = 0; i < params.symbols; ++i) {
        const long long shift = symbol_cp_shift(i, params);
        DechirpedSymbol& d = out[i];
        d.direction = sched[i];
        d.symbol_index = i;
        d.samples.resize(win);
        for (std::size_t j = 0; j < win; ++j) {
            const cplx ref = chirp_sample(static_cast<long long>(j) -
                                              static_cast<long long>(params.l_cp) - shift,
                                          params.mn(), sched[i]);
            d.samples[j] = rx.samples[i * win + j] * std::conj(ref);
        }
    }
    return out;
}

/// Beat-frequency x Doppler magnitude map for one chirp direction.
struct RangeDopplerMap {
    std::size_t beat_bins = 0;     // MN + L_cp
    std::size_t doppler_bins = 0;  // symbols of this direction
    std::vector<double> magnitudes;  // beat-major: [b * doppler_bins + c]
    double bin_to_range_m = 0.0;
    double bin_to_velocity_mps = 0.0;
    ChirpDirection direction = ChirpDirection::Up;
    bool doppler_degenerate = false;  // fewer than 2 symbols

    double at(std::size_t b, std::size_t c) const { return magnitudes[b * doppler_bins + c]; }
    /// Doppler column -> signed velocity (fftshifted axis).
    double velocity_of(double c) const {
        return (c - static_cast<double>(doppler_bins / 2)) * bin_to_velocity_mps;
    }
};

/// Fast-time DFT per symbol, then slow-time DFT per beat bin, magnitudes.
/// Up-chirp spectra are index-flipped so target beats land at positive bins
/// (f_bu = f_B - f_D, f_bd = f_B + f_D). Optional Hann window on fast time.
inline RangeDopplerMap range_doppler_map(const std::vector<DechirpedSymbol>& symbols,
                                         ChirpDirection dir, const WaveformParams& params,
                                         bool hann_window = false) {
    std::vector<const DechirpedSymbol*> sel;
    for (const auto& s : symbols)
        if (s.direction == dir) sel.push_back(&s);
    require(!sel.empty(), "range_doppler_map: no symbols of requested direction");
    const std::size_t w = params.symbol_len();
    const std::size_t sp = sel.size();

    RangeDopplerMap map;
    map.beat_bins = w;
    map.doppler_bins = sp;
    map.direction = dir;
    map.doppler_degenerate = sp < 2;
    map.bin_to_range_m = params.range_bin_m();
    map.bin_to_velocity_mps =
        kSpeedOfLight / (2.0 * params.carrier_hz * static_cast<double>(sp) *
                         params.symbol_duration_s());

    // fast time
    std::vector<cvec> spectra(sp);
    for (std::size_t s = 0; s < sp; ++s) {
        cvec v = sel[s]->samples;
        if (hann_window) {
            for (std::size_t j = 0; j < w; ++j)
                v[j] *= 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(j) /
                                              static_cast<double>(w - 1)));
        }
        detail::unitary_fft_inplace(v, FFTW_FORWARD);
        if (dir == ChirpDirection::Up) {
            cvec flipped(w);
            for (std::size_t b = 0; b < w; ++b) flipped[b] = v[(w - b) % w];
            v.swap(flipped);
        }
        spectra[s] = std::move(v);
    }
    // slow time, fftshifted so column sp/2 is zero Doppler
    map.magnitudes.assign(w * sp, 0.0);
    cvec slow(sp);
    for (std::size_t b = 0; b < w; ++b) {
        for (std::size_t s = 0; s < sp; ++s) slow[s] = spectra[s][b];
        if (sp > 1) detail::unitary_fft_inplace(slow, FFTW_FORWARD);
        for (std::size_t c = 0; c < sp; ++c) {
            const std::size_t src = (c + sp - sp / 2) % sp;  // unshift
            map.magnitudes[b * sp + c] = std::abs(slow[src]);
        }
    }
    return map;
}

struct Detection {
    std::size_t beat_bin = 0;
    std::size_t doppler_bin = 0;
    double magnitude = 0.0;
    double beat_bin_refined = 0.0;     // sub-bin, ratio-refined
    double doppler_bin_refined = 0.0;  // sub-bin, fftshifted axis
    // Full fractional beat frequency in bins. The per-symbol CP shifts keep
    // the chirp continuous, so each echo dechirps to a single tone spanning
    // the frame: the fast-time FFT pins its integer bin and the slow-time
    // axis measures the fractional part of the same frequency. Range and
    // velocity separate only across the two chirp directions.
    double beat_freq_bins = 0.0;
    double range_m = 0.0;
    double velocity_mps = 0.0;  // apparent (slow-time axis); see updown_resolve
};

struct ThresholdPolicy {
    double kappa = 8.0;        // threshold = mean + kappa * stddev of the map
    std::size_t max_peaks = 16;
};

namespace detail {

/// Sub-bin refinement from the two largest magnitude bins; returns the
/// offset in [-0.5, 0.5]. For a rectangular-window tone the Dirichlet kernel
/// gives |X[k+1]|/|X[k]| = delta/(1-delta) up to O(1/n^2), so the ratio
/// estimator is asymptotically unbiased where a dB-parabola fit is not.
inline double refine_offset(double m_lo, double m_0, double m_hi) {
    const double eps = 1e-300;
    if (m_hi >= m_lo) {
        const double a = m_hi / std::max(m_0, eps);
        return std::clamp(a / (1.0 + a), 0.0, 0.5);
    }
    const double a = m_lo / std::max(m_0, eps);
    return std::clamp(-a / (1.0 + a), -0.5, 0.0);
}

}  // namespace detail

/// Greedy local-maximum extraction above mean + kappa*stddev, guard window of
/// +-1 bin per axis, sorted by magnitude.
inline std::vector<Detection> detect_peaks(const RangeDopplerMap& map,
                                           const ThresholdPolicy& policy = {}) {
    const std::size_t w = map.beat_bins, sp = map.doppler_bins;
    double mean = 0.0;
    for (double v : map.magnitudes) mean += v;
    mean /= static_cast<double>(map.magnitudes.size());
    double var = 0.0;
    for (double v : map.magnitudes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(map.magnitudes.size());
    const double thresh = mean + policy.kappa * std::sqrt(var);

    std::vector<Detection> dets;
    for (std::size_t b = 0; b < w; ++b) {
        for (std::size_t c = 0; c < sp; ++c) {
            const double v = map.at(b, c);
            if (v <= thresh) continue;
            bool is_max = true;
            // both axes are circular: fast time is a DFT over the window and
            // slow time a DFT over the symbols
            for (long long db = -1; db <= 1 && is_max; ++db) {
                for (long long dc = -1; dc <= 1; ++dc) {
                    if (db == 0 && dc == 0) continue;
                    const std::size_t bb = static_cast<std::size_t>(
                        mod(static_cast<long long>(b) + db, static_cast<long long>(w)));
                    const std::size_t cc = static_cast<std::size_t>(
                        mod(static_cast<long long>(c) + dc, static_cast<long long>(sp)));
                    if (map.at(bb, cc) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max) continue;
            Detection d;
            d.beat_bin = b;
            d.doppler_bin = c;
            d.magnitude = v;
            const double mb_lo = map.at((b + w - 1) % w, c);
            const double mb_hi = map.at((b + 1) % w, c);
            d.beat_bin_refined =
                static_cast<double>(b) + detail::refine_offset(mb_lo, v, mb_hi);
            double off_c = 0.0;
            if (sp > 1)
                off_c = detail::refine_offset(map.at(b, (c + sp - 1) % sp), v,
                                              map.at(b, (c + 1) % sp));
            d.doppler_bin_refined = static_cast<double>(c) + off_c;
            if (!map.doppler_degenerate) {
                // slow-time frequency of the continuous tone, cycles/symbol
                const double nu = (d.doppler_bin_refined -
                                   static_cast<double>(sp / 2)) /
                                  static_cast<double>(sp);
                // up-chirp spectra were index-flipped, negating the tone
                const double sfrac = map.direction == ChirpDirection::Up ? -nu : nu;
                d.beat_freq_bins = std::round(d.beat_bin_refined - sfrac) + sfrac;
            } else {
                d.beat_freq_bins = d.beat_bin_refined;
            }
            d.range_m = d.beat_freq_bins * map.bin_to_range_m;
            d.velocity_mps = map.velocity_of(d.doppler_bin_refined);
            dets.push_back(d);
        }
    }
    std::sort(dets.begin(), dets.end(),
              [](const Detection& a, const Detection& b) { return a.magnitude > b.magnitude; });
    // Guard rules against double-counting a single echo:
    //  - straddle lobes: drop anything within +-1 bin of a stronger peak on
    //    both axes (an off-grid tone splits across adjacent bins);
    //  - sidelobe skirt: drop anything within +-3 beat bins at any Doppler
    //    that is well below the stronger peak. Sidelobes sit >= 13 dB down,
    //    so equal-power targets sharing a beat bin survive, while a skirt
    //    crossing the threshold on clean maps cannot mis-pair later.
    std::vector<Detection> kept;
    for (const auto& d : dets) {
        bool clash = false;
        for (const auto& k : kept) {
            const long long db_raw = std::llabs(static_cast<long long>(d.beat_bin) -
                                                static_cast<long long>(k.beat_bin));
            const long long db = std::min(db_raw, static_cast<long long>(w) - db_raw);
            const long long dc_raw = std::llabs(static_cast<long long>(d.doppler_bin) -
                                                static_cast<long long>(k.doppler_bin));
            const long long dc = std::min(dc_raw, static_cast<long long>(sp) - dc_raw);
            if ((db <= 1 && dc <= 1) || (db <= 3 && d.magnitude < 0.4 * k.magnitude)) {
                clash = true;
                break;
            }
        }
        if (!clash) kept.push_back(d);
        if (kept.size() >= policy.max_peaks) break;
    }
    return kept;
}

struct RangeVelocity {
    double range_m = 0.0;
    double velocity_mps = 0.0;
};

struct UpDownResolution {
    std::vector<RangeVelocity> resolved;
    std::vector<Detection> leftovers;  // unmatched detections, both directions
};

/// Pairs up/down beat frequencies (nearest-neighbor with a max-distance
/// gate). With f_bu = f_B - f_D and f_bd = f_B + f_D, the pair average fixes
/// range and the pair difference fixes Doppler. Both use the slow-time
/// refined beat frequencies, so velocity resolution is set by the slow-time
/// axis, not the far coarser fast-time bin spacing.
inline UpDownResolution updown_resolve(const std::vector<Detection>& up,
                                       const std::vector<Detection>& down,
                                       const WaveformParams& params,
                                       double max_beat_gap_bins = 3.0) {
    UpDownResolution res;
    std::vector<bool> used_down(down.size(), false);
    for (const auto& u : up) {
        long long best = -1;
        double best_gap = max_beat_gap_bins;
        for (std::size_t j = 0; j < down.size(); ++j) {
            if (used_down[j]) continue;
            const double gap = std::abs(u.beat_freq_bins - down[j].beat_freq_bins);
            if (gap <= best_gap) {
                best_gap = gap;
                best = static_cast<long long>(j);
            }
        }
        if (best < 0) {
            res.leftovers.push_back(u);
            continue;
        }
        const auto& d = down[static_cast<std::size_t>(best)];
        used_down[static_cast<std::size_t>(best)] = true;
        RangeVelocity rv;
        const auto wrap_half = [](double x) { return x - std::round(x); };
        // The fractional beat parts come from the slow-time axis and are far
        // more reliable than the fast-time integer reconstruction, whose
        // rounding can flip a whole bin near half-integer beat frequencies.
        // The up/down fraction difference equals 2 f_D directly (unambiguous
        // for |f_D| below half a bin per symbol), so no integers are needed
        // for velocity; the sum is re-reconciled against the rounded bins.
        const double frac_u = wrap_half(u.beat_freq_bins);
        const double frac_d = wrap_half(d.beat_freq_bins);
        const double frac_sum = frac_u + frac_d;
        const double beat_sum =
            std::round(u.beat_freq_bins + d.beat_freq_bins - frac_sum) + frac_sum;
        rv.range_m = 0.5 * beat_sum * params.range_bin_m();
        // beat bins are cycles per symbol window
        const double doppler_hz =
            0.5 * wrap_half(frac_d - frac_u) / params.symbol_duration_s();
        rv.velocity_mps = doppler_hz * kSpeedOfLight / (2.0 * params.carrier_hz);
        res.resolved.push_back(rv);
    }
    for (std::size_t j = 0; j < down.size(); ++j)
        if (!used_down[j]) res.leftovers.push_back(down[j]);
    return res;
}

struct RmsePenalty {
    double range_m;
    double velocity_mps;
};

inline RmsePenalty default_rmse_penalty(const WaveformParams& params) {
    // missed target scores half the unambiguous span on each axis
    const double vel_span = kSpeedOfLight / (4.0 * params.carrier_hz * params.symbol_duration_s());
    return {params.unambiguous_range_m() / 2.0, vel_span / 2.0};
}

struct SensingRmse {
    double range_m = 0.0;
    double velocity_mps = 0.0;
};

/// RMSE over targets, nearest-range association; each missed target scores
/// the configured penalty.
inline SensingRmse sensing_rmse(const std::vector<RangeVelocity>& estimates,
                                const std::vector<RadarTarget>& truth,
                                const RmsePenalty& penalty) {
    require(!truth.empty(), "sensing_rmse: empty truth");
    std::vector<bool> used(estimates.size(), false);
    double se_r = 0.0, se_v = 0.0;
    for (const auto& t : truth) {
        long long best = -1;
        double best_gap = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < estimates.size(); ++j) {
            if (used[j]) continue;
            const double gap = std::abs(estimates[j].range_m - t.range_m);
            if (gap < best_gap) {
                best_gap = gap;
                best = static_cast<long long>(j);
            }
        }
        if (best < 0) {
            se_r += penalty.range_m * penalty.range_m;
            se_v += penalty.velocity_mps * penalty.velocity_mps;
            continue;
        }
        used[static_cast<std::size_t>(best)] = true;
        const auto& e = estimates[static_cast<std::size_t>(best)];
        se_r += (e.range_m - t.range_m) * (e.range_m - t.range_m);
        se_v += (e.velocity_mps - t.velocity_mps) * (e.velocity_mps - t.velocity_mps);
    }
    const double n = static_cast<double>(truth.size());
    return {std::sqrt(se_r / n), std::sqrt(se_v / n)};
}

/// CSV export: header row of velocity axis, then one row per beat bin
/// (range_m, magnitudes...).
inline void write_rdmap_csv(const RangeDopplerMap& map, const std::string& path) {
    std::ofstream f(path);
    require(f.good(), "write_rdmap_csv: cannot open " + path);
    f << "range_m";
    for (std::size_t c = 0; c < map.doppler_bins; ++c)
        f << ',' << map.velocity_of(static_cast<double>(c));
    f << '\n';
    for (std::size_t b = 0; b < map.beat_bins; ++b) {
        f << b * map.bin_to_range_m;
        for (std::size_t c = 0; c < map.doppler_bins; ++c) f << ',' << map.at(b, c);
        f << '\n';
    }
}

}  // namespace jsac
