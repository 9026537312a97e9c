// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mono-static radar channel (delayed, Doppler-shifted echoes) and the
// doubly-selective integer delay/Doppler communication channel, plus AWGN.

#include <cmath>
#include <optional>

#include "jsac/common.hpp"
#include "jsac/numerics.hpp"
#include "jsac/params.hpp"
#include "jsac/waveform.hpp"

namespace jsac {

/// Ground-truth radar scatterer.
struct RadarTarget {
    cplx gain{1.0, 0.0};
    double range_m = 0.0;
    double velocity_mps = 0.0;

    double delay_s() const { return 2.0 * range_m / kSpeedOfLight; }
    double doppler_hz(double carrier_hz) const {
        return 2.0 * velocity_mps * carrier_hz / kSpeedOfLight;
    }
};

/// Ground-truth communication tap: integer sample delay, integer Doppler bin
/// (cycles per MN samples).
struct CommTap {
    cplx gain{1.0, 0.0};
    long long delay = 0;    // l_r, samples, 0 <= l_r < L_cp
    long long doppler = 0;  // k_r, |k_r| < N/2
};

inline double snr_to_noise_var(double snr_db, double reference_power) {
    return reference_power / std::pow(10.0, snr_db / 10.0);
}

/// Adds circularly-symmetric complex Gaussian noise with total variance
/// reference_power / 10^(snr/10). snr_db = +inf leaves the signal unchanged.
inline void awgn(cvec& signal, double snr_db, double reference_power, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0) return;
    require(reference_power > 0.0, "awgn: reference power must be positive");
    const double var = snr_to_noise_var(snr_db, reference_power);
    for (auto& x : signal) x += rng.cgaussian(var);
}

struct RadarChannelResult {
    TimeDomainStream stream;
    double noise_var = 0.0;
    std::vector<std::string> warnings;
};

/// Received mean power of the frame's chirp component alone, used as the
/// radar SNR reference.
inline double received_chirp_power(const std::vector<RadarTarget>& targets,
                                   const WaveformParams& params) {
    double gain2 = 0.0;
    for (const auto& t : targets) gain2 += std::norm(t.gain);
    // chirp grid energy psi*M over MN time samples
    return gain2 * params.psi * static_cast<double>(params.m) / static_cast<double>(params.mn());
}

/// y(t) = sum_q h_q s(t - tau_q) exp(j 2 pi nu_q (t - tau_q)) with delays
/// rounded to the nearest sample, plus AWGN at snr_r relative to the received
/// chirp power.
inline RadarChannelResult apply_radar_channel(const TimeDomainStream& tx,
                                              const std::vector<RadarTarget>& targets,
                                              const WaveformParams& params, double snr_r_db,
                                              std::uint64_t seed) {
    RadarChannelResult res;
    res.stream.sample_rate_hz = tx.sample_rate_hz;
    res.stream.symbol_starts = tx.symbol_starts;
    res.stream.samples.assign(tx.samples.size(), cplx{0.0, 0.0});
    const double ts = 1.0 / tx.sample_rate_hz;
    for (const auto& t : targets) {
        require(t.range_m > 0.0, "radar channel: target range must be positive");
        const double tau = t.delay_s();
        require(tau < static_cast<double>(tx.samples.size()) * ts,
                "radar channel: delay exceeds frame duration");
        if (t.range_m > params.unambiguous_range_m())
            res.warnings.push_back("target beyond unambiguous range, aliasing expected");
        const long long d = std::llround(tau * tx.sample_rate_hz);
        const double nu = t.doppler_hz(params.carrier_hz);
        for (std::size_t p = d < 0 ? 0 : static_cast<std::size_t>(d); p < tx.samples.size(); ++p) {
            const double dt = (static_cast<double>(p) - static_cast<double>(d)) * ts;
            const double ph = 2.0 * kPi * nu * dt;
            res.stream.samples[p] +=
                t.gain * tx.samples[p - d] * cplx{std::cos(ph), std::sin(ph)};
        }
    }
    const double ref = received_chirp_power(targets, params);
    Rng rng(seed);
    if (targets.empty()) {
        // pure noise at the level a unit-gain target would set
        double psi_ref = params.psi * static_cast<double>(params.m) / static_cast<double>(params.mn());
        if (psi_ref <= 0.0) psi_ref = 1.0;
        awgn(res.stream.samples, snr_r_db, psi_ref, rng);
        res.noise_var = snr_to_noise_var(snr_r_db, psi_ref);
    } else if (ref > 0.0) {
        awgn(res.stream.samples, snr_r_db, ref, rng);
        res.noise_var = snr_to_noise_var(snr_r_db, ref);
    }
    return res;
}

/// Mean received signal power over the comm channel (noiseless), the comm
/// SNR reference.
inline double received_comm_power(const std::vector<CommTap>& taps,
                                  const WaveformParams& params) {
    double gain2 = 0.0;
    for (const auto& t : taps) gain2 += std::norm(t.gain);
    const double mn = static_cast<double>(params.mn());
    const double tx_power = (params.sigma_d2 * static_cast<double>(params.data_per_symbol()) +
                             params.psi * static_cast<double>(params.m)) /
                            mn;
    return gain2 * tx_power;
}

struct CommChannelResult {
    TimeDomainStream stream;
    double noise_var = 0.0;
};

/// Doubly-selective channel y(p) = sum_r h_r x(p - l_r) exp(j2pi k_r (p-l_r)/MN)
/// applied per symbol; the CP makes each delay circular over the symbol body
/// and the Doppler ramp is referenced to the body start.
inline CommChannelResult apply_comm_channel(const TimeDomainStream& tx,
                                            const std::vector<CommTap>& taps,
                                            const WaveformParams& params, double snr_c_db,
                                            std::uint64_t seed) {
    require(!taps.empty(), "comm channel: at least one tap required");
    for (const auto& t : taps) {
        require(t.delay >= 0 && t.delay < static_cast<long long>(params.l_cp),
                "comm channel: tap delay must satisfy 0 <= l_r < L_cp");
        require(std::llabs(t.doppler) < static_cast<long long>(params.n) / 2,
                "comm channel: |k_r| must be < N/2");
    }
    const std::size_t mn = params.mn();
    const std::size_t sym_len = params.symbol_len();
    CommChannelResult res;
    res.stream.sample_rate_hz = tx.sample_rate_hz;
    res.stream.symbol_starts = tx.symbol_starts;
    res.stream.samples.assign(tx.samples.size(), cplx{0.0, 0.0});
    for (std::size_t s = 0; s + sym_len <= tx.samples.size(); s += sym_len) {
        // circular channel over the body, CP rebuilt from the output body
        for (const auto& t : taps) {
            for (std::size_t p = 0; p < mn; ++p) {
                const long long src = mod(static_cast<long long>(p) - t.delay,
                                          static_cast<long long>(mn));
                const double ph = 2.0 * kPi * static_cast<double>(t.doppler) *
                                  (static_cast<double>(p) - static_cast<double>(t.delay)) /
                                  static_cast<double>(mn);
                res.stream.samples[s + params.l_cp + p] +=
                    t.gain * tx.samples[s + params.l_cp + static_cast<std::size_t>(src)] *
                    cplx{std::cos(ph), std::sin(ph)};
            }
        }
        for (std::size_t j = 0; j < params.l_cp; ++j)
            res.stream.samples[s + j] = res.stream.samples[s + mn + j];
    }
    Rng rng(seed);
    const double ref = received_comm_power(taps, params);
    awgn(res.stream.samples, snr_c_db, ref, rng);
    res.noise_var = std::isinf(snr_c_db) ? 0.0 : snr_to_noise_var(snr_c_db, ref);
    return res;
}

}  // namespace jsac
