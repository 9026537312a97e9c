// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "jsac/channel.hpp"
#include "jsac/sim.hpp"

using namespace jsac;

namespace {

WaveformParams comm_params() {
    WaveformParams p;
    p.m = 32;
    p.n = 32;
    p.l_cp = 8;
    p.symbols = 4;
    p.psi = 10.0;
    return p;
}

constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Closed-form grid image of a single tap (h, lambda, kappa) applied
/// circularly over one symbol body: row shift by kappa, column shift by
/// lambda, with the per-entry phases that the time-domain model implies.
ComplexGrid single_tap_grid_oracle(const ComplexGrid& x, cplx h, long long lambda,
                                   long long kappa, const WaveformParams& p) {
    const long long n = static_cast<long long>(p.n);
    const long long m = static_cast<long long>(p.m);
    const long long mn = static_cast<long long>(p.mn());
    ComplexGrid y(p.n, p.m);
    for (long long kp = 0; kp < n; ++kp) {
        for (long long lp = 0; lp < m; ++lp) {
            const long long k0 = mod(kp - kappa, n);
            const long long l0 = mod(lp - lambda, m);
            const long long mm = (kappa + k0 - kp) / n;  // integer by construction
            const double ph = 2.0 * kPi * static_cast<double>(mm * lp) / static_cast<double>(m) -
                              2.0 * kPi * static_cast<double>((k0 + kappa) * lambda) /
                                  static_cast<double>(mn);
            y(static_cast<std::size_t>(kp), static_cast<std::size_t>(lp)) =
                h * x(static_cast<std::size_t>(k0), static_cast<std::size_t>(l0)) *
                cplx{std::cos(ph), std::sin(ph)};
        }
    }
    return y;
}

}  // namespace

TEST_CASE("radar channel: unit target with one-sample delay shifts the stream") {
    auto p = comm_params();
    Rng rng(1);
    const auto tx = make_tx_frame(p, rng).stream;
    RadarTarget t;
    t.range_m = 0.5 * kSpeedOfLight / p.bandwidth_hz;  // exactly one sample
    t.velocity_mps = 0.0;
    const auto rx = apply_radar_channel(tx, {t}, p, kNoNoise, 2);
    for (std::size_t i = 1; i < tx.samples.size(); ++i)
        CHECK(std::abs(rx.stream.samples[i] - tx.samples[i - 1]) < 1e-12);
    CHECK(std::abs(rx.stream.samples[0]) < 1e-12);
}

TEST_CASE("radar channel: 30 m at 200 MHz is exactly 40 samples of delay") {
    auto p = comm_params();
    RadarTarget t;
    t.range_m = 30.0;
    const double delay_samples = t.delay_s() * p.bandwidth_hz;
    CHECK(delay_samples == Catch::Approx(40.0).epsilon(1e-3));
}

TEST_CASE("radar channel is linear in the input") {
    auto p = comm_params();
    Rng rng(3);
    const auto f1 = make_tx_frame(p, rng).stream;
    const auto f2 = make_tx_frame(p, rng).stream;
    std::vector<RadarTarget> targets{{{0.8, 0.1}, 22.0, 13.0}, {{-0.2, 0.5}, 41.0, -30.0}};
    TimeDomainStream sum = f1;
    for (std::size_t i = 0; i < sum.samples.size(); ++i)
        sum.samples[i] = 2.0 * f1.samples[i] + cplx{0.0, 1.0} * f2.samples[i];
    const auto y1 = apply_radar_channel(f1, targets, p, kNoNoise, 0);
    const auto y2 = apply_radar_channel(f2, targets, p, kNoNoise, 0);
    const auto ys = apply_radar_channel(sum, targets, p, kNoNoise, 0);
    for (std::size_t i = 0; i < sum.samples.size(); ++i)
        CHECK(std::abs(ys.stream.samples[i] -
                       (2.0 * y1.stream.samples[i] + cplx{0.0, 1.0} * y2.stream.samples[i])) <
              1e-9);
}

TEST_CASE("radar channel warns beyond the unambiguous range and flags empty scenes") {
    auto p = comm_params();
    Rng rng(4);
    const auto tx = make_tx_frame(p, rng).stream;
    RadarTarget far;
    far.range_m = p.unambiguous_range_m() + 10.0;
    const auto rx = apply_radar_channel(tx, {far}, p, kNoNoise, 0);
    CHECK_FALSE(rx.warnings.empty());

    const auto noise_only = apply_radar_channel(tx, {}, p, 0.0, 7);
    double power = 0.0;
    for (const auto& s : noise_only.stream.samples) power += std::norm(s);
    power /= static_cast<double>(noise_only.stream.samples.size());
    CHECK(power == Catch::Approx(noise_only.noise_var).epsilon(0.05));
}

TEST_CASE("comm channel: trivial tap is the identity") {
    auto p = comm_params();
    Rng rng(5);
    const auto tx = make_tx_frame(p, rng).stream;
    const auto rx = apply_comm_channel(tx, {{cplx{1.0, 0.0}, 0, 0}}, p, kNoNoise, 0);
    for (std::size_t i = 0; i < tx.samples.size(); ++i)
        CHECK(std::abs(rx.stream.samples[i] - tx.samples[i]) < 1e-12);
    CHECK(rx.noise_var == 0.0);
}

TEST_CASE("comm channel matches the closed-form grid mapping for single taps") {
    auto p = comm_params();
    Rng rng(6);
    const auto tx = make_tx_frame(p, rng);
    const cplx h{0.7, -0.4};
    for (auto [lambda, kappa] : {std::pair<long long, long long>{0, 2},
                                 {3, 0},
                                 {5, 2},
                                 {7, -15},
                                 {1, 15},
                                 {4, -7}}) {
        const auto rx = apply_comm_channel(tx.stream, {{h, lambda, kappa}}, p, kNoNoise, 0);
        for (std::size_t i = 0; i < p.symbols; ++i) {
            cvec body(rx.stream.samples.begin() +
                          static_cast<long>(i * p.symbol_len() + p.l_cp),
                      rx.stream.samples.begin() + static_cast<long>((i + 1) * p.symbol_len()));
            const ComplexGrid got = scifdm_demodulate(body, p);
            const ComplexGrid want = single_tap_grid_oracle(tx.grids[i], h, lambda, kappa, p);
            for (std::size_t j = 0; j < got.data.size(); ++j)
                CHECK(std::abs(got.data[j] - want.data[j]) < 1e-9);
        }
    }
}

TEST_CASE("comm channel superposes taps linearly") {
    auto p = comm_params();
    Rng rng(8);
    const auto tx = make_tx_frame(p, rng).stream;
    const CommTap t1{{0.9, 0.2}, 2, 3};
    const CommTap t2{{-0.3, 0.6}, 6, -5};
    const auto y1 = apply_comm_channel(tx, {t1}, p, kNoNoise, 0);
    const auto y2 = apply_comm_channel(tx, {t2}, p, kNoNoise, 0);
    const auto y12 = apply_comm_channel(tx, {t1, t2}, p, kNoNoise, 0);
    for (std::size_t i = 0; i < tx.samples.size(); ++i)
        CHECK(std::abs(y12.stream.samples[i] - y1.stream.samples[i] - y2.stream.samples[i]) <
              1e-12);
}

TEST_CASE("comm channel rejects taps outside the CP / Doppler limits") {
    auto p = comm_params();
    Rng rng(9);
    const auto tx = make_tx_frame(p, rng).stream;
    CHECK_THROWS_AS(apply_comm_channel(tx, {{cplx{1, 0}, 8, 0}}, p, kNoNoise, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_comm_channel(tx, {{cplx{1, 0}, 0, 16}}, p, kNoNoise, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_comm_channel(tx, {}, p, kNoNoise, 0), std::invalid_argument);
}

TEST_CASE("awgn variance and determinism") {
    Rng rng(10);
    cvec v(1000000, cplx{0.0, 0.0});
    Rng noise_rng(11);
    awgn(v, 3.0, 2.0, noise_rng);
    const double target = 2.0 / std::pow(10.0, 0.3);
    double emp = 0.0;
    for (const auto& x : v) emp += std::norm(x);
    emp /= static_cast<double>(v.size());
    CHECK(emp == Catch::Approx(target).epsilon(0.01));

    cvec a(64, cplx{1.0, 0.0}), b(64, cplx{1.0, 0.0});
    Rng ra(12), rb(12);
    awgn(a, 10.0, 1.0, ra);
    awgn(b, 10.0, 1.0, rb);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    cvec c(16, cplx{0.5, 0.5});
    const cvec before = c;
    Rng rc(13);
    awgn(c, kNoNoise, 1.0, rc);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == before[i]);
}
