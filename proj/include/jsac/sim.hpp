// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded Monte-Carlo experiment runner: end-to-end trials (TX -> channels ->
// both receivers), metric aggregation, CSV emission and plot rendering.
// Trials are parallel with per-trial derived seeds, so serial and parallel
// runs produce byte-identical output.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "jsac/channel.hpp"
#include "jsac/comm_rx.hpp"
#include "jsac/config.hpp"
#include "jsac/plot.hpp"
#include "jsac/qam.hpp"
#include "jsac/radar_rx.hpp"
#include "jsac/waveform.hpp"

namespace jsac {

struct TrialMetrics {
    double ber = 0.0;
    double nmse = 0.0;
    double range_rmse_m = 0.0;
    double velocity_rmse_mps = 0.0;
    std::size_t detections = 0;
    std::uint64_t seed = 0;
    bool failed = false;
};

struct TxFrame {
    std::vector<std::uint8_t> bits;  // all data bits, symbol-major
    std::vector<ComplexGrid> grids;  // combined grids per symbol
    TimeDomainStream stream;
};

/// Draws random data bits, maps them around the per-symbol chirp, builds the
/// CP-extended frame. with_data=false zeroes the data (pure-FMCW operation).
inline TxFrame make_tx_frame(const WaveformParams& params, Rng& rng, bool with_data = true) {
    params.validate();
    QamConstellation qam(params.qam_order);
    const std::size_t bps = qam.bits_per_symbol();
    const auto sched = params.schedule();
    const double amp = std::sqrt(params.sigma_d2);
    TxFrame frame;
    frame.grids.reserve(params.symbols);
    for (std::size_t i = 0; i < params.symbols; ++i) {
        ComplexGrid data(params.n, params.m);
        if (with_data) {
            for (const auto& [k, l] : data_positions(params, i, sched[i])) {
                std::uint32_t label = 0;
                for (std::size_t b = 0; b < bps; ++b) {
                    const auto bit = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
                    frame.bits.push_back(bit);
                    label = (label << 1) | bit;
                }
                data(k, l) = amp * qam.map(label);
            }
        }
        frame.grids.push_back(
            assemble_combined(data, chirp_dft_sparse(sched[i], params, i), params));
    }
    frame.stream = build_frame(frame.grids, params);
    return frame;
}

inline std::vector<CommTap> draw_comm_taps(std::size_t count, const WaveformParams& params,
                                           Rng& rng) {
    std::vector<CommTap> taps;
    while (taps.size() < count) {
        CommTap t;
        t.delay = rng.uniform_int(0, static_cast<long long>(params.l_cp) - 1);
        const long long kmax = static_cast<long long>(params.n) / 2 - 1;
        t.doppler = rng.uniform_int(-kmax, kmax);
        bool dup = false;
        for (const auto& u : taps) dup |= (u.delay == t.delay && u.doppler == t.doppler);
        if (dup) continue;
        t.gain = rng.cgaussian(1.0 / static_cast<double>(count));
        taps.push_back(t);
    }
    return taps;
}

inline std::vector<RadarTarget> draw_targets(const ExperimentConfig& cfg, Rng& rng) {
    std::vector<RadarTarget> targets;
    for (std::size_t q = 0; q < cfg.num_targets; ++q) {
        RadarTarget t;
        t.range_m = rng.uniform(cfg.target_range_min_m, cfg.target_range_max_m);
        t.velocity_mps = rng.uniform(cfg.target_vel_min_mps, cfg.target_vel_max_mps);
        const double ph = rng.uniform(0.0, 2.0 * kPi);
        t.gain = {std::cos(ph), std::sin(ph)};
        targets.push_back(t);
    }
    return targets;
}

struct CommTrialResult {
    double ber = 0.0;
    double nmse = 0.0;
    ChannelEstimate estimate;
};

/// One end-to-end communication trial over the given taps: TX frame, channel
/// at snr_c, pilot channel estimation, LMMSE equalization, demap. Throws on
/// numerical failure (callers record and skip).
inline CommTrialResult run_comm_trial_taps(const std::vector<CommTap>& taps,
                                           const WaveformParams& params, double snr_c_db,
                                           std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xF4A));
    const TxFrame tx = make_tx_frame(params, rng);
    const auto rx = apply_comm_channel(tx.stream, taps, params, snr_c_db,
                                       derive_seed(seed, 0xC0FFEE));

    std::vector<ComplexGrid> rx_grids;
    rx_grids.reserve(params.symbols);
    const std::size_t win = params.symbol_len();
    for (std::size_t i = 0; i < params.symbols; ++i) {
        cvec body(rx.stream.samples.begin() + static_cast<long>(i * win + params.l_cp),
                  rx.stream.samples.begin() + static_cast<long>((i + 1) * win));
        rx_grids.push_back(scifdm_demodulate(body, params));
    }

    EstimatorOptions opts;
    double sum_gain2 = 0.0;
    for (const auto& t : taps) sum_gain2 += std::norm(t.gain);
    opts.sum_gain2 = sum_gain2;
    opts.noise_var = rx.noise_var;

    CommTrialResult res;
    res.estimate = estimate_channel(rx_grids, params, opts);
    res.nmse = channel_nmse(res.estimate, taps, params);
    if (res.estimate.taps.empty()) {
        // estimation failed outright: no equalization possible, bits are coin
        // flips; score the trial instead of aborting it
        res.ber = 0.5;
        return res;
    }

    Equalizer eq(res.estimate, params, rx.noise_var);
    cvec symbols;
    symbols.reserve(params.symbols * params.data_per_symbol());
    for (std::size_t i = 0; i < params.symbols; ++i) {
        const ComplexGrid x_hat = eq.equalize_grid(rx_grids[i]);
        const cvec d = read_data_symbols(x_hat, params, i);
        symbols.insert(symbols.end(), d.begin(), d.end());
    }
    res.ber = demap_and_score(symbols, tx.bits, params);
    return res;
}

/// Same trial with taps drawn at random from the seed.
inline CommTrialResult run_comm_trial(std::size_t num_taps, const WaveformParams& params,
                                      double snr_c_db, std::uint64_t seed) {
    Rng rng(seed);
    const auto taps = draw_comm_taps(num_taps, params, rng);
    return run_comm_trial_taps(taps, params, snr_c_db, seed);
}

struct RadarTrialResult {
    SensingRmse rmse;
    std::size_t detections = 0;
    UpDownResolution resolution;
};

/// One end-to-end radar trial against known targets.
inline RadarTrialResult run_radar_trial(const std::vector<RadarTarget>& targets,
                                        const WaveformParams& params, double snr_r_db,
                                        double detector_kappa, std::uint64_t seed,
                                        bool with_data = true) {
    Rng rng(seed);
    const TxFrame tx = make_tx_frame(params, rng, with_data);
    const auto rx = apply_radar_channel(tx.stream, targets, params, snr_r_db,
                                        derive_seed(seed, 0x5ADA));
    const auto dechirped = dechirp(rx.stream, params);
    const auto map_up = range_doppler_map(dechirped, ChirpDirection::Up, params);
    const auto map_down = range_doppler_map(dechirped, ChirpDirection::Down, params);
    ThresholdPolicy policy;
    policy.kappa = detector_kappa;
    const auto det_up = detect_peaks(map_up, policy);
    const auto det_down = detect_peaks(map_down, policy);

    RadarTrialResult res;
    res.resolution = updown_resolve(det_up, det_down, params);
    res.detections = res.resolution.resolved.size();
    res.rmse = sensing_rmse(res.resolution.resolved, targets, default_rmse_penalty(params));
    return res;
}

/// Combined sensing + communication trial at one sweep point.
inline TrialMetrics run_trial(const ExperimentConfig& cfg, double snr_db, double psi_ratio_db,
                              std::uint64_t seed) {
    WaveformParams params = cfg.waveform;
    params.psi = params.sigma_d2 * std::pow(10.0, psi_ratio_db / 10.0);
    TrialMetrics m;
    m.seed = seed;
    const auto comm = run_comm_trial(cfg.num_taps, params, snr_db, derive_seed(seed, 1));
    m.ber = comm.ber;
    m.nmse = comm.nmse;
    Rng scene_rng(derive_seed(seed, 2));
    const auto targets = draw_targets(cfg, scene_rng);
    const auto radar =
        run_radar_trial(targets, params, snr_db, cfg.detector_kappa, derive_seed(seed, 3));
    m.range_rmse_m = radar.rmse.range_m;
    m.velocity_rmse_mps = radar.rmse.velocity_mps;
    m.detections = radar.detections;
    return m;
}

struct SweepRow {
    double snr_db = 0.0;
    double psi_ratio_db = 0.0;
    double ber_mean = 0.0;
    double ber_se = 0.0;
    double nmse_mean = 0.0;
    double range_rmse_m = 0.0;
    double vel_rmse_mps = 0.0;
    std::size_t trials = 0;  // trials that completed
};

struct MetricsTable {
    std::vector<SweepRow> rows;
    std::vector<double> psi_ratio_db_list;
};

namespace detail {

struct GridPoint {
    double snr_db, psi_ratio_db;
};

}  // namespace detail

/// Runs the full sweep. Per-trial seeds derive from (seed, point, trial), so
/// results do not depend on thread count or scheduling.
inline MetricsTable run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0) {
    cfg.validate();
    std::vector<detail::GridPoint> points;
    for (double ratio : cfg.psi_ratio_db_list)
        for (double snr : cfg.snr_db_list) points.push_back({snr, ratio});

    std::vector<std::vector<TrialMetrics>> results(points.size(),
                                                   std::vector<TrialMetrics>(cfg.trials));
    const std::size_t total = points.size() * cfg.trials;
    std::atomic<std::size_t> next{0};
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const std::size_t gp = idx / cfg.trials;
            const std::size_t tr = idx % cfg.trials;
            const std::uint64_t seed = derive_seed(cfg.seed, gp, tr);
            TrialMetrics& m = results[gp][tr];
            try {
                m = run_trial(cfg, points[gp].snr_db, points[gp].psi_ratio_db, seed);
            } catch (const std::exception&) {
                m.seed = seed;
                m.failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    MetricsTable table;
    table.psi_ratio_db_list = cfg.psi_ratio_db_list;
    for (std::size_t gp = 0; gp < points.size(); ++gp) {
        SweepRow row;
        row.snr_db = points[gp].snr_db;
        row.psi_ratio_db = points[gp].psi_ratio_db;
        double ber2 = 0.0;
        for (const auto& m : results[gp]) {
            if (m.failed) continue;
            ++row.trials;
            row.ber_mean += m.ber;
            ber2 += m.ber * m.ber;
            row.nmse_mean += m.nmse;
            row.range_rmse_m += m.range_rmse_m * m.range_rmse_m;
            row.vel_rmse_mps += m.velocity_rmse_mps * m.velocity_rmse_mps;
        }
        if (row.trials > 0) {
            const double n = static_cast<double>(row.trials);
            row.ber_mean /= n;
            row.nmse_mean /= n;
            row.range_rmse_m = std::sqrt(row.range_rmse_m / n);
            row.vel_rmse_mps = std::sqrt(row.vel_rmse_mps / n);
            const double var = std::max(0.0, ber2 / n - row.ber_mean * row.ber_mean);
            row.ber_se = std::sqrt(var / n);
        }
        table.rows.push_back(row);
    }
    return table;
}

inline std::string format_metric(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline void write_metrics_csv(const MetricsTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "metrics: cannot open " + path);
    f << "snr_db,psi_ratio_db,ber_mean,ber_se,nmse_mean,range_rmse_m,vel_rmse_mps,trials\n";
    for (const auto& r : table.rows) {
        f << format_metric(r.snr_db) << ',' << format_metric(r.psi_ratio_db) << ','
          << format_metric(r.ber_mean) << ',' << format_metric(r.ber_se) << ','
          << format_metric(r.nmse_mean) << ',' << format_metric(r.range_rmse_m) << ','
          << format_metric(r.vel_rmse_mps) << ',' << r.trials << '\n';
    }
}

inline MetricsTable read_metrics_csv(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "metrics: cannot open " + path);
    std::string line;
    require(static_cast<bool>(std::getline(f, line)), "metrics: empty file");
    MetricsTable table;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cells;
        while (std::getline(ss, tok, ',')) cells.push_back(tok);
        require(cells.size() == 8, "metrics: malformed row");
        SweepRow r;
        r.snr_db = std::stod(cells[0]);
        r.psi_ratio_db = std::stod(cells[1]);
        r.ber_mean = std::stod(cells[2]);
        r.ber_se = std::stod(cells[3]);
        r.nmse_mean = std::stod(cells[4]);
        r.range_rmse_m = std::stod(cells[5]);
        r.vel_rmse_mps = std::stod(cells[6]);
        r.trials = std::stoul(cells[7]);
        bool seen = false;
        for (double p : table.psi_ratio_db_list) seen |= (p == r.psi_ratio_db);
        if (!seen) table.psi_ratio_db_list.push_back(r.psi_ratio_db);
        table.rows.push_back(r);
    }
    return table;
}

/// Renders BER/NMSE/RMSE curves per pilot-power ratio plus a range-Doppler
/// heat map of one configured scene.
inline void emit_plots(const MetricsTable& table, const ExperimentConfig& cfg,
                       const std::string& out_dir) {
    require(!table.rows.empty(), "emit_plots: empty metrics table");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto series_of = [&](auto getter) {
        std::vector<plot::Series> series;
        for (double ratio : table.psi_ratio_db_list) {
            plot::Series s;
            char lab[48];
            std::snprintf(lab, sizeof(lab), "RATIO %g DB", ratio);
            s.label = lab;
            for (const auto& r : table.rows) {
                if (r.psi_ratio_db != ratio) continue;
                s.x.push_back(r.snr_db);
                s.y.push_back(getter(r));
            }
            series.push_back(std::move(s));
        }
        return series;
    };

    plot::LinePlotSpec spec;
    spec.xlabel = "SNR (DB)";
    spec.title = "BER VS SNR";
    spec.ylabel = "BER";
    spec.log_y = true;
    plot::line_plot(series_of([](const SweepRow& r) { return r.ber_mean; }), spec,
                    out_dir + "/ber_vs_snr.png");
    spec.title = "CHANNEL NMSE VS SNR";
    spec.ylabel = "NMSE";
    plot::line_plot(series_of([](const SweepRow& r) { return r.nmse_mean; }), spec,
                    out_dir + "/nmse_vs_snr.png");
    spec.log_y = false;
    spec.title = "RANGE RMSE VS SNR";
    spec.ylabel = "RMSE (M)";
    plot::line_plot(series_of([](const SweepRow& r) { return r.range_rmse_m; }), spec,
                    out_dir + "/range_rmse_vs_snr.png");
    spec.title = "VELOCITY RMSE VS SNR";
    spec.ylabel = "RMSE (M/S)";
    plot::line_plot(series_of([](const SweepRow& r) { return r.vel_rmse_mps; }), spec,
                    out_dir + "/velocity_rmse_vs_snr.png");

    // range-Doppler heat map of one scene at the median sweep SNR
    WaveformParams params = cfg.waveform;
    params.psi = params.sigma_d2 *
                 std::pow(10.0, table.psi_ratio_db_list.back() / 10.0);
    Rng rng(derive_seed(cfg.seed, 0xD3, 0));
    const auto targets = draw_targets(cfg, rng);
    const TxFrame tx = make_tx_frame(params, rng);
    const double snr = table.rows[table.rows.size() / 2].snr_db;
    const auto rx =
        apply_radar_channel(tx.stream, targets, params, snr, derive_seed(cfg.seed, 0xD4, 0));
    const auto map = range_doppler_map(dechirp(rx.stream, params), ChirpDirection::Up, params);
    write_rdmap_csv(map, out_dir + "/rdmap.csv");

    // crop the beat axis to the configured scene for readability
    const std::size_t max_bin = std::min(
        map.beat_bins, static_cast<std::size_t>(2.0 * cfg.target_range_max_m /
                                                map.bin_to_range_m));
    std::vector<double> vals;
    vals.reserve(max_bin * map.doppler_bins);
    for (std::size_t b = 0; b < max_bin; ++b)
        for (std::size_t c = 0; c < map.doppler_bins; ++c) vals.push_back(map.at(b, c));
    plot::HeatmapSpec hspec;
    hspec.title = "RANGE-DOPPLER MAP";
    hspec.xlabel = "VELOCITY (M/S)";
    hspec.ylabel = "RANGE (M)";
    hspec.x0 = map.velocity_of(0.0);
    hspec.x1 = map.velocity_of(static_cast<double>(map.doppler_bins - 1));
    hspec.y0 = 0.0;
    hspec.y1 = static_cast<double>(max_bin) * map.bin_to_range_m;
    plot::heatmap(vals, map.doppler_bins, max_bin, hspec, out_dir + "/rdmap.png");
}

}  // namespace jsac
