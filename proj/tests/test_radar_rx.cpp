// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "jsac/radar_rx.hpp"
#include "jsac/sim.hpp"

#include <filesystem>

using namespace jsac;

namespace {

WaveformParams chirp_only_params(std::size_t symbols = 16) {
    WaveformParams p;
    p.m = 32;
    p.n = 32;
    p.l_cp = 8;
    p.symbols = symbols;
    p.psi = 10.0;
    return p;
}

constexpr double kNoNoise = std::numeric_limits<double>::infinity();

TimeDomainStream pure_chirp_frame(const WaveformParams& p) {
    std::vector<ComplexGrid> grids;
    const auto sched = p.schedule();
    for (std::size_t i = 0; i < p.symbols; ++i)
        grids.push_back(
            assemble_combined(ComplexGrid(p.n, p.m), chirp_dft_sparse(sched[i], p, i), p));
    return build_frame(grids, p);
}

}  // namespace

TEST_CASE("dechirping the clean transmitted chirp leaves a DC line") {
    auto p = chirp_only_params(4);
    p.chirp_schedule.assign(p.symbols, ChirpDirection::Up);
    const auto tx = pure_chirp_frame(p);
    const auto d = dechirp(tx, p);
    REQUIRE(d.size() == p.symbols);
    for (const auto& sym : d) {
        cvec v = sym.samples;
        detail::unitary_fft_inplace(v, FFTW_FORWARD);
        double total = 0.0;
        for (const auto& x : v) total += std::norm(x);
        CHECK(std::norm(v[0]) / total > 0.99);
    }
}

TEST_CASE("a 40-sample delay dechirps to a tone at beat bin 40") {
    auto p = chirp_only_params(4);
    p.chirp_schedule.assign(p.symbols, ChirpDirection::Up);
    const auto tx = pure_chirp_frame(p);
    RadarTarget t;
    t.range_m = 30.0;  // 40 samples at 200 MHz
    const auto rx = apply_radar_channel(tx, {t}, p, kNoNoise, 0);
    const auto d = dechirp(rx.stream, p);
    const std::size_t w = p.symbol_len();
    // skip symbol 0: its window samples preceding the echo arrival are zero
    cvec v = d[1].samples;
    detail::unitary_fft_inplace(v, FFTW_FORWARD);
    // up-chirp beat appears at negative frequency => near bin W-40 before any
    // flip; the range-Doppler map flips it positive. The true frequency is
    // -40*W/MN = -40.3125 bins (the CP stretches the window past one chirp
    // period), so the tone is off-grid and leaks: check the peak location and
    // that the energy concentrates around it.
    std::size_t best = 0;
    double total = 0.0;
    for (std::size_t b = 0; b < w; ++b) {
        total += std::norm(v[b]);
        if (std::abs(v[b]) > std::abs(v[best])) best = b;
    }
    CHECK(best == w - 40);
    double local = 0.0;
    for (long long off = -5; off <= 5; ++off)
        local += std::norm(v[static_cast<std::size_t>(
            mod(static_cast<long long>(best) + off, static_cast<long long>(w)))]);
    CHECK(local / total > 0.9);
}

TEST_CASE("range-doppler map places a static target on its range bin") {
    auto p = chirp_only_params(16);
    p.chirp_schedule.assign(p.symbols, ChirpDirection::Up);
    const auto tx = pure_chirp_frame(p);
    RadarTarget t;
    t.range_m = 30.0;
    const auto rx = apply_radar_channel(tx, {t}, p, kNoNoise, 0);
    const auto map = range_doppler_map(dechirp(rx.stream, p), ChirpDirection::Up, p);
    CHECK_FALSE(map.doppler_degenerate);
    // find arg max
    std::size_t best_b = 0, best_c = 0;
    double best = -1.0;
    for (std::size_t b = 0; b < map.beat_bins; ++b)
        for (std::size_t c = 0; c < map.doppler_bins; ++c)
            if (map.at(b, c) > best) {
                best = map.at(b, c);
                best_b = b;
                best_c = c;
            }
    CHECK(best_b == 40);
    // The echo is one continuous tone at -40*W/MN = -40.3125 fast-time bins,
    // so its fractional part shows up on the slow-time axis: round(-0.3125 *
    // 16) = -5 columns from the zero-velocity column 8.
    CHECK(best_c == 3);
    CHECK(std::abs(best_b * map.bin_to_range_m - 30.0) < 1.0);
    // the detector folds the slow-time fraction back into the beat frequency
    const auto dets = detect_peaks(map);
    REQUIRE_FALSE(dets.empty());
    CHECK(dets[0].beat_freq_bins == Catch::Approx(40.3125).margin(0.02));
    CHECK(dets[0].range_m == Catch::Approx(29.979).margin(0.05));
}

TEST_CASE("up/down pipeline resolves range and velocity of a moving target") {
    WaveformParams p;  // default 32x32, 100 symbols: 50 up then 50 down
    p.psi = 1.0;
    const auto tx = pure_chirp_frame(p);
    RadarTarget t;
    t.range_m = 30.0;
    t.velocity_mps = 20.0;
    const auto rx = apply_radar_channel(tx, {t}, p, kNoNoise, 0);
    const auto sym = dechirp(rx.stream, p);
    const auto up = detect_peaks(range_doppler_map(sym, ChirpDirection::Up, p));
    const auto down = detect_peaks(range_doppler_map(sym, ChirpDirection::Down, p));
    REQUIRE_FALSE(up.empty());
    REQUIRE_FALSE(down.empty());
    const auto res = updown_resolve(up, down, p);
    REQUIRE(res.resolved.size() == 1);
    CHECK(std::abs(res.resolved[0].range_m - 30.0) < 0.5);
    CHECK(std::abs(res.resolved[0].velocity_mps - 20.0) < 3.0);
}

TEST_CASE("doubling the range doubles the beat bin") {
    auto p = chirp_only_params(4);
    p.chirp_schedule.assign(p.symbols, ChirpDirection::Up);
    const auto tx = pure_chirp_frame(p);
    auto peak_bin = [&](double range) {
        RadarTarget t;
        t.range_m = range;
        const auto rx = apply_radar_channel(tx, {t}, p, kNoNoise, 0);
        const auto map = range_doppler_map(dechirp(rx.stream, p), ChirpDirection::Up, p);
        std::size_t best_b = 0;
        double best = -1.0;
        for (std::size_t b = 0; b < map.beat_bins; ++b)
            for (std::size_t c = 0; c < map.doppler_bins; ++c)
                if (map.at(b, c) > best) {
                    best = map.at(b, c);
                    best_b = b;
                }
        return best_b;
    };
    const auto b1 = peak_bin(15.0);
    const auto b2 = peak_bin(30.0);
    CHECK(std::llabs(static_cast<long long>(b2) - 2 * static_cast<long long>(b1)) <= 1);
}

TEST_CASE("peak detector fires on a synthetic spike and stays quiet on flat maps") {
    RangeDopplerMap map;
    map.beat_bins = 64;
    map.doppler_bins = 8;
    map.bin_to_range_m = 1.0;
    map.bin_to_velocity_mps = 1.0;
    map.magnitudes.assign(64 * 8, 1.0);
    CHECK(detect_peaks(map).empty());
    map.magnitudes[17 * 8 + 3] = 50.0;
    const auto dets = detect_peaks(map);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].beat_bin == 17);
    CHECK(dets[0].doppler_bin == 3);
}

TEST_CASE("guard window suppresses shoulders of a strong peak") {
    RangeDopplerMap map;
    map.beat_bins = 32;
    map.doppler_bins = 4;
    map.bin_to_range_m = 1.0;
    map.bin_to_velocity_mps = 1.0;
    map.magnitudes.assign(32 * 4, 0.01);
    map.magnitudes[10 * 4 + 2] = 100.0;
    map.magnitudes[11 * 4 + 2] = 60.0;  // adjacent shoulder, also above threshold
    const auto dets = detect_peaks(map);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].beat_bin == 10);
}

TEST_CASE("up/down resolution recovers range and velocity and keeps leftovers") {
    WaveformParams p = chirp_only_params(16);
    // m/s per bin of half beat difference
    const double v_unit = kSpeedOfLight / (2.0 * p.carrier_hz * p.symbol_duration_s());
    Detection u;
    u.beat_freq_bins = 40.0 - 0.05;
    u.range_m = u.beat_freq_bins * p.range_bin_m();
    Detection d = u;
    d.beat_freq_bins = 40.0 + 0.05;
    d.range_m = d.beat_freq_bins * p.range_bin_m();
    const auto res = updown_resolve({u}, {d}, p);
    REQUIRE(res.resolved.size() == 1);
    CHECK(res.resolved[0].range_m == Catch::Approx(40.0 * p.range_bin_m()));
    CHECK(res.resolved[0].velocity_mps == Catch::Approx(0.05 * v_unit));
    CHECK(res.leftovers.empty());

    // equal beat frequencies -> zero velocity
    const auto res2 = updown_resolve({u}, {u}, p);
    CHECK(res2.resolved[0].velocity_mps == Catch::Approx(0.0));

    // far-apart beats never pair
    Detection far = u;
    far.beat_freq_bins = 200.0;
    const auto res3 = updown_resolve({u}, {far}, p);
    CHECK(res3.resolved.empty());
    CHECK(res3.leftovers.size() == 2);

    CHECK(updown_resolve({}, {}, p).resolved.empty());
}

TEST_CASE("sensing rmse scores perfect, offset, and missed targets") {
    std::vector<RadarTarget> truth{{cplx{1, 0}, 30.0, 10.0}, {cplx{1, 0}, 60.0, -5.0}};
    const RmsePenalty pen{10.0, 20.0};
    const std::vector<RangeVelocity> exact{{30.0, 10.0}, {60.0, -5.0}};
    auto r = sensing_rmse(exact, truth, pen);
    CHECK(r.range_m == 0.0);
    CHECK(r.velocity_mps == 0.0);

    const std::vector<RangeVelocity> offset{{30.75, 10.0}, {60.75, -5.0}};
    r = sensing_rmse(offset, truth, pen);
    CHECK(r.range_m == Catch::Approx(0.75));

    r = sensing_rmse({}, truth, pen);
    CHECK(r.range_m == Catch::Approx(10.0));
    CHECK(r.velocity_mps == Catch::Approx(20.0));

    CHECK_THROWS_AS(sensing_rmse(exact, {}, pen), std::invalid_argument);
}

TEST_CASE("noise-only maps rarely trigger the default threshold") {
    auto p = chirp_only_params(16);
    std::size_t false_alarms = 0;
    const std::size_t trials = 40;
    const auto tx = pure_chirp_frame(p);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto rx = apply_radar_channel(tx, {}, p, 10.0, derive_seed(55, trial));
        const auto map = range_doppler_map(dechirp(rx.stream, p), ChirpDirection::Up, p);
        if (!detect_peaks(map).empty()) ++false_alarms;
    }
    CHECK(false_alarms <= trials / 20);
}

TEST_CASE("range-doppler CSV export round numbers") {
    RangeDopplerMap map;
    map.beat_bins = 4;
    map.doppler_bins = 2;
    map.bin_to_range_m = 0.5;
    map.bin_to_velocity_mps = 2.0;
    map.magnitudes = {1, 2, 3, 4, 5, 6, 7, 8};
    const auto path = std::filesystem::temp_directory_path() / "rdmap_test.csv";
    write_rdmap_csv(map, path.string());
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "range_m,-2,0");
    std::string row;
    std::getline(f, row);
    CHECK(row == "0,1,2");
    std::filesystem::remove(path);
}
