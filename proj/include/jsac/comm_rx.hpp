// SPDX-License-Identifier: Apache-2.0
#pragma once

// Communication receiver: delay-Doppler pilot scan over the embedded chirp,
// up/down shift-ambiguity resolution, tap gain estimation, LMMSE
// equalization on the structured channel operator, demapping and scoring.
//
// A tap (l_r, k_r) acting on an up-chirp is exactly a constant times the same
// chirp delayed by l_r - k_r (complete the square in the quadratic phase);
// for a down-chirp the net delay is l_r + k_r. The scan therefore correlates
// the received grid against every circularly shifted chirp; the up/down pair
// of net shifts then separates delay from Doppler.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "jsac/channel.hpp"
#include "jsac/common.hpp"
#include "jsac/params.hpp"
#include "jsac/qam.hpp"
#include "jsac/waveform.hpp"

namespace jsac {

/// The observation handed to the hypothesis scan: the full demodulated grid
/// (no positions discarded; delay and Doppler are unknown) plus the symbol
/// index whose CP-shift congruence offset the scan must subtract.
struct PilotObservation {
    const ComplexGrid* grid = nullptr;
    std::size_t symbol_index = 0;
    ChirpDirection direction = ChirpDirection::Up;
};

inline PilotObservation extract_pilot_observation(const ComplexGrid& y,
                                                  const WaveformParams& params,
                                                  std::size_t symbol_index) {
    require(y.rows == params.n && y.cols == params.m,
            "extract_pilot_observation: grid is not NxM");
    return {&y, symbol_index, params.schedule()[symbol_index]};
}

/// Off-hypothesis statistic variance (sigma_d^2 sum|h_r|^2 + sigma^2)/(psi M).
inline double pilot_statistic_variance(const WaveformParams& params, double sum_gain2,
                                       double noise_var) {
    return (params.sigma_d2 * sum_gain2 + noise_var) /
           (params.psi * static_cast<double>(params.m));
}

/// Correlates the grid against the chirp at every hypothesized net shift
/// s in [0, MN). For the true shift the statistic equals the tap gain times a
/// unit phase; elsewhere it averages toward zero with the variance above.
inline cvec pilot_transform(const PilotObservation& obs, const WaveformParams& params) {
    const std::size_t mn = params.mn();
    const long long sigma = symbol_cp_shift(obs.symbol_index, params);
    const ComplexGrid& y = *obs.grid;
    cvec stats(mn);
    const double norm = 1.0 / (static_cast<double>(params.m) * std::sqrt(params.psi));
    for (std::size_t s = 0; s < mn; ++s) {
        const long long eff = sigma + static_cast<long long>(s);
        cplx acc{0.0, 0.0};
        for (std::size_t l = 0; l < params.m; ++l) {
            const std::size_t k = chirp_row(l, eff, params, obs.direction);
            const double w = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(l) /
                             static_cast<double>(mn);
            const cplx ref = chirp_sample(static_cast<long long>(l) - eff, mn, obs.direction) *
                             cplx{std::cos(w), std::sin(w)};
            acc += y(k, l) * std::conj(ref);
        }
        stats[s] = norm * acc;
    }
    return stats;
}

/// Unit phase relating the true-shift statistic to the tap gain:
/// statistic = h * phase, with phase depending on the Doppler bin and the
/// symbol's chirp shift.
inline cplx gain_correction(long long doppler, long long cp_shift, ChirpDirection dir,
                            const WaveformParams& params) {
    const double mn = static_cast<double>(params.mn());
    const double k = static_cast<double>(doppler);
    const double s = static_cast<double>(cp_shift);
    double ph = (dir == ChirpDirection::Up) ? kPi * (2.0 * k * s - k * k) / mn
                                            : kPi * (k * k + 2.0 * k * s) / mn;
    return {std::cos(ph), std::sin(ph)};
}

struct ShiftHypothesis {
    long long shift = 0;   // net chirp shift, signed residue in (-MN/2, MN/2]
    double power = 0.0;    // mean |statistic|^2 over symbols
};

/// Per-direction scan result averaged over all symbols of that direction.
struct DirectionScan {
    ChirpDirection direction = ChirpDirection::Up;
    std::vector<cvec> per_symbol_stats;       // one MN-vector per symbol
    std::vector<std::size_t> symbol_indices;  // frame indices of those symbols
    std::vector<double> mean_power;           // MN entries, mean |stat|^2
};

inline DirectionScan scan_direction(const std::vector<ComplexGrid>& grids,
                                    ChirpDirection dir, const WaveformParams& params) {
    DirectionScan scan;
    scan.direction = dir;
    const auto sched = params.schedule();
    scan.mean_power.assign(params.mn(), 0.0);
    for (std::size_t i = 0; i < grids.size(); ++i) {
        if (sched[i] != dir) continue;
        auto obs = extract_pilot_observation(grids[i], params, i);
        cvec stats = pilot_transform(obs, params);
        for (std::size_t s = 0; s < stats.size(); ++s) scan.mean_power[s] += std::norm(stats[s]);
        scan.per_symbol_stats.push_back(std::move(stats));
        scan.symbol_indices.push_back(i);
    }
    require(!scan.per_symbol_stats.empty(), "scan_direction: no symbols of this direction");
    const double inv = 1.0 / static_cast<double>(scan.per_symbol_stats.size());
    for (auto& p : scan.mean_power) p *= inv;
    return scan;
}

/// Above-threshold hypotheses, strongest first.
inline std::vector<ShiftHypothesis> threshold_hypotheses(const DirectionScan& scan,
                                                         double power_threshold,
                                                         std::size_t max_count) {
    std::vector<ShiftHypothesis> hyps;
    const long long mn = static_cast<long long>(scan.mean_power.size());
    for (long long s = 0; s < mn; ++s) {
        if (scan.mean_power[static_cast<std::size_t>(s)] > power_threshold)
            hyps.push_back({signed_mod(s, mn), scan.mean_power[static_cast<std::size_t>(s)]});
    }
    std::sort(hyps.begin(), hyps.end(),
              [](const ShiftHypothesis& a, const ShiftHypothesis& b) { return a.power > b.power; });
    if (hyps.size() > max_count) hyps.resize(max_count);
    return hyps;
}

struct EstimatedTap {
    long long delay = 0;
    long long doppler = 0;
    cplx gain{0.0, 0.0};
};

struct ChannelEstimate {
    std::vector<EstimatedTap> taps;
    double detection_threshold = 0.0;  // on mean |statistic|^2
    std::vector<ShiftHypothesis> unresolved_up;
    std::vector<ShiftHypothesis> unresolved_down;
};

struct EstimatorOptions {
    double threshold_sigmas = 4.0;  // multiplies sqrt(var) of the statistic mean
    std::size_t max_taps = 8;
    /// Known-statistics variance inputs; sum_gain2 < 0 means estimate the
    /// noise floor from the scan itself instead.
    double sum_gain2 = -1.0;
    double noise_var = 0.0;
    bool consistency_check = true;  // reject ghost pairs with inconsistent gains
};

namespace detail {

/// Median of |stat|^2 as a robust noise-floor estimate for the scan.
inline double scan_noise_floor(const DirectionScan& scan) {
    std::vector<double> v = scan.mean_power;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    // median of an exponential with mean m is m*ln 2
    return v[v.size() / 2] / std::log(2.0);
}

}  // namespace detail

/// Solves the up/down system k_r - l_r = -s_up, k_r + l_r = s_down over
/// signed residues: l_r = (s_up + s_down)/2, k_r = (s_down - s_up)/2. Keeps
/// integer solutions with 0 <= l_r < L_cp and |k_r| < N/2.
inline std::vector<std::pair<long long, long long>> resolve_shift_ambiguity(
    const std::vector<ShiftHypothesis>& up, const std::vector<ShiftHypothesis>& down,
    const WaveformParams& params) {
    std::vector<std::pair<long long, long long>> taps;
    for (const auto& hu : up) {
        for (const auto& hd : down) {
            const long long sum = hu.shift + hd.shift;
            const long long diff = hd.shift - hu.shift;
            if (sum % 2 != 0) continue;  // parity mismatch, no integer solution
            const long long l_r = sum / 2;
            const long long k_r = diff / 2;
            if (l_r < 0 || l_r >= static_cast<long long>(params.l_cp)) continue;
            if (std::llabs(k_r) >= static_cast<long long>(params.n) / 2) continue;
            if (std::find(taps.begin(), taps.end(), std::make_pair(l_r, k_r)) == taps.end())
                taps.emplace_back(l_r, k_r);
        }
    }
    return taps;
}

/// Coherent gain from one direction's per-symbol statistics at the tap's net
/// shift, phase-corrected per symbol.
inline cplx estimate_gain_one_direction(const DirectionScan& scan, long long net_shift,
                                        long long doppler, const WaveformParams& params) {
    const long long mn = static_cast<long long>(params.mn());
    const std::size_t s = static_cast<std::size_t>(mod(net_shift, mn));
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < scan.per_symbol_stats.size(); ++i) {
        const long long sigma = symbol_cp_shift(scan.symbol_indices[i], params);
        const cplx corr = gain_correction(doppler, sigma, scan.direction, params);
        acc += scan.per_symbol_stats[i][s] * std::conj(corr);
    }
    return acc / static_cast<double>(scan.per_symbol_stats.size());
}

/// Full pilot-based channel estimation over a frame of demodulated grids.
inline ChannelEstimate estimate_channel(const std::vector<ComplexGrid>& grids,
                                        const WaveformParams& params,
                                        const EstimatorOptions& opts = {}) {
    require(params.has_both_directions(),
            "estimate_channel: schedule needs at least one up and one down chirp");
    DirectionScan up = scan_direction(grids, ChirpDirection::Up, params);
    DirectionScan down = scan_direction(grids, ChirpDirection::Down, params);

    double var;
    if (opts.sum_gain2 >= 0.0) {
        var = pilot_statistic_variance(params, opts.sum_gain2, opts.noise_var);
    } else {
        var = 0.5 * (detail::scan_noise_floor(up) + detail::scan_noise_floor(down));
    }
    const double n_up = static_cast<double>(up.per_symbol_stats.size());
    const double n_down = static_cast<double>(down.per_symbol_stats.size());
    const double n_min = std::min(n_up, n_down);
    // mean |stat|^2 over S' symbols: noise-only mean var, std var/sqrt(S')
    const double thresh = var * (1.0 + opts.threshold_sigmas / std::sqrt(n_min));

    ChannelEstimate est;
    est.detection_threshold = thresh;
    auto hyp_up = threshold_hypotheses(up, thresh, opts.max_taps);
    auto hyp_down = threshold_hypotheses(down, thresh, opts.max_taps);
    auto shifts = resolve_shift_ambiguity(hyp_up, hyp_down, params);

    // A cross-pairing of two unrelated hypotheses can pass the parity and
    // range checks. Real taps are exposed by coherence: the Doppler-corrected
    // gain recovers nearly all of the excess scan power at the shift, while a
    // wrong-Doppler candidate averages its phases down (fully to ~1/S' when
    // the Doppler error is large, partially when it is small). Cross-pairings
    // with a small Doppler error can therefore not be rejected by a threshold
    // alone, so candidates are matched greedily in decreasing order of their
    // worst-direction coherence: each direction shift is consumed by the first
    // candidate that claims it, and a candidate may only rely on a direction
    // whose coherence clears 0.3.
    {
        const long long mn_s = static_cast<long long>(params.mn());
        struct Candidate {
            long long l, k;
            double coh_up, coh_down;
        };
        std::vector<Candidate> cands;
        cands.reserve(shifts.size());
        for (const auto& [l_r, k_r] : shifts) {
            const auto su = static_cast<std::size_t>(mod(l_r - k_r, mn_s));
            const auto sd = static_cast<std::size_t>(mod(l_r + k_r, mn_s));
            const cplx gu = estimate_gain_one_direction(up, l_r - k_r, k_r, params);
            const cplx gd = estimate_gain_one_direction(down, l_r + k_r, k_r, params);
            const double pu = std::max(up.mean_power[su] - var, 1e-300);
            const double pd = std::max(down.mean_power[sd] - var, 1e-300);
            cands.push_back({l_r, k_r, std::norm(gu) / pu, std::norm(gd) / pd});
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            return std::min(a.coh_up, a.coh_down) > std::min(b.coh_up, b.coh_down);
        });
        std::set<long long> used_up, used_down;
        std::vector<std::pair<long long, long long>> selected;
        for (const auto& c : cands) {
            const bool uu = used_up.count(c.l - c.k) != 0;
            const bool ud = used_down.count(c.l + c.k) != 0;
            if (uu && ud) continue;  // both directions already explained
            if (!uu && !ud) {
                if (std::max(c.coh_up, c.coh_down) < 0.3) continue;
            } else {
                // only the unconsumed direction can support this candidate
                const double coh_free = uu ? c.coh_down : c.coh_up;
                if (coh_free < 0.3) continue;
            }
            used_up.insert(c.l - c.k);
            used_down.insert(c.l + c.k);
            selected.emplace_back(c.l, c.k);
        }
        shifts.swap(selected);
    }

    // count how many candidates share each direction's net shift (collisions)
    std::map<long long, int> up_uses, down_uses;
    for (const auto& [l_r, k_r] : shifts) {
        ++up_uses[l_r - k_r];
        ++down_uses[l_r + k_r];
    }
    for (const auto& [l_r, k_r] : shifts) {
        const long long s_up = l_r - k_r;
        const long long s_down = l_r + k_r;
        const bool up_clean = up_uses[s_up] == 1;
        const bool down_clean = down_uses[s_down] == 1;
        cplx g_up = estimate_gain_one_direction(up, s_up, k_r, params);
        cplx g_down = estimate_gain_one_direction(down, s_down, k_r, params);
        cplx gain;
        if (up_clean && down_clean) {
            if (opts.consistency_check &&
                std::abs(g_up - g_down) > 0.75 * (std::abs(g_up) + std::abs(g_down)))
                continue;  // ghost pairing: the two directions disagree
            gain = 0.5 * (g_up + g_down);
        } else if (down_clean) {
            gain = g_down;  // overlapping taps on the up-chirp shift
        } else if (up_clean) {
            gain = g_up;
        } else {
            continue;  // collided in both directions, cannot attribute
        }
        est.taps.push_back({l_r, k_r, gain});
    }
    // hypotheses that paired with nothing are reported, not silently dropped
    for (const auto& h : hyp_up) {
        bool used = false;
        for (const auto& t : est.taps) used |= (t.delay - t.doppler == h.shift);
        if (!used) est.unresolved_up.push_back(h);
    }
    for (const auto& h : hyp_down) {
        bool used = false;
        for (const auto& t : est.taps) used |= (t.delay + t.doppler == h.shift);
        if (!used) est.unresolved_down.push_back(h);
    }
    return est;
}

/// LMMSE equalizer on the structured delay-Doppler operator. In the MN-point
/// frequency domain a tap (h, l, k) is the banded operator
/// B[f, f-k] += h exp(-j 2 pi f l / MN), so the regularized normal system is
/// sparse with bandwidth set by the Doppler spread.
class Equalizer {
public:
    Equalizer(const ChannelEstimate& est, const WaveformParams& params, double noise_var)
        : params_(params) {
        require(!est.taps.empty(), "equalizer: empty channel estimate");
        const long long mn = static_cast<long long>(params.mn());
        Eigen::SparseMatrix<cplx> b(mn, mn);
        std::vector<Eigen::Triplet<cplx>> trips;
        trips.reserve(est.taps.size() * static_cast<std::size_t>(mn));
        for (const auto& t : est.taps) {
            for (long long f = 0; f < mn; ++f) {
                const double ph = -2.0 * kPi * static_cast<double>(f) *
                                  static_cast<double>(t.delay) / static_cast<double>(mn);
                trips.emplace_back(static_cast<int>(f), static_cast<int>(mod(f - t.doppler, mn)),
                                   t.gain * cplx{std::cos(ph), std::sin(ph)});
            }
        }
        b.setFromTriplets(trips.begin(), trips.end());
        b_ = b;
        double gamma = noise_var / params.sigma_d2;
        Eigen::SparseMatrix<cplx> normal = (b.adjoint() * b).pruned();
        Eigen::SparseMatrix<cplx> eye(mn, mn);
        eye.setIdentity();
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double g = std::max(gamma, 1e-12);
            Eigen::SparseMatrix<cplx> sys = normal + g * eye;
            solver_.compute(sys);
            if (solver_.info() == Eigen::Success) return;
            regularization_floored_ = true;
            gamma = std::max(gamma * 100.0, 1e-6);
        }
        fail("equalizer: normal system factorization failed");
    }

    bool regularization_floored() const { return regularization_floored_; }

    /// Equalizes one demodulated symbol grid back to a transmit-grid estimate.
    ComplexGrid equalize_grid(const ComplexGrid& y) const {
        cvec t = scifdm_modulate(y, params_);  // grid -> time body
        detail::unitary_fft_inplace(t, FFTW_FORWARD);
        const long long mn = static_cast<long long>(params_.mn());
        Eigen::VectorXcd yf(mn);
        for (long long f = 0; f < mn; ++f) yf[f] = t[static_cast<std::size_t>(f)];
        Eigen::VectorXcd xf = solver_.solve(b_.adjoint() * yf);
        for (long long f = 0; f < mn; ++f) t[static_cast<std::size_t>(f)] = xf[f];
        detail::unitary_fft_inplace(t, FFTW_BACKWARD);
        return scifdm_demodulate(t, params_);
    }

private:
    WaveformParams params_;
    Eigen::SparseMatrix<cplx> b_;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> solver_;
    bool regularization_floored_ = false;
};

/// Reads the data positions of an equalized grid, in the transmit mapping
/// order.
inline cvec read_data_symbols(const ComplexGrid& grid, const WaveformParams& params,
                              std::size_t symbol_index) {
    const auto dir = params.schedule()[symbol_index];
    cvec out;
    out.reserve(params.data_per_symbol());
    for (const auto& [k, l] : data_positions(params, symbol_index, dir)) out.push_back(grid(k, l));
    return out;
}

/// Hard-decision Gray demapping and bit error ratio.
inline double demap_and_score(const cvec& estimates, const std::vector<std::uint8_t>& tx_bits,
                              const WaveformParams& params) {
    QamConstellation qam(params.qam_order);
    const std::size_t bps = qam.bits_per_symbol();
    require(estimates.size() * bps == tx_bits.size(), "demap_and_score: bit count mismatch");
    const double scale = 1.0 / std::sqrt(params.sigma_d2);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const std::uint32_t label = qam.demap(estimates[i] * scale);
        for (std::size_t b = 0; b < bps; ++b) {
            const std::uint8_t bit = (label >> (bps - 1 - b)) & 1u;
            if (bit != tx_bits[i * bps + b]) ++errors;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(tx_bits.size());
}

/// ||h_hat - h||^2 / ||h||^2 over the full delay-Doppler tap grid; missed
/// taps count as zero estimates, spurious taps add to the error.
inline double channel_nmse(const ChannelEstimate& estimate, const std::vector<CommTap>& truth,
                           const WaveformParams& params) {
    require(!truth.empty(), "channel_nmse: empty truth");
    std::map<std::pair<long long, long long>, cplx> diff;
    double denom = 0.0;
    for (const auto& t : truth) {
        diff[{t.delay, t.doppler}] -= t.gain;
        denom += std::norm(t.gain);
    }
    for (const auto& t : estimate.taps) diff[{t.delay, t.doppler}] += t.gain;
    double num = 0.0;
    for (const auto& [key, v] : diff) num += std::norm(v);
    return num / denom;
}

}  // namespace jsac
