// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configuration: flat key-value text file, versioned schema,
// unknown keys rejected.

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jsac/common.hpp"
#include "jsac/params.hpp"

namespace jsac {

struct ExperimentConfig {
    WaveformParams waveform;
    // target / tap generation policy
    std::size_t num_targets = 3;
    double target_range_min_m = 10.0;
    double target_range_max_m = 80.0;
    double target_vel_min_mps = -70.0;
    double target_vel_max_mps = 70.0;
    std::size_t num_taps = 3;
    // sweeps
    std::vector<double> snr_db_list{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<double> psi_ratio_db_list{10.0, 15.0, 20.0};
    std::size_t trials = 50;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    double detector_kappa = 8.0;

    void validate() const {
        waveform.validate();
        require(!snr_db_list.empty(), "config: snr_db_list must be non-empty");
        require(!psi_ratio_db_list.empty(), "config: psi_ratio_db_list must be non-empty");
        require(trials >= 1, "config: trials must be >= 1");
        require(num_targets >= 1 && num_taps >= 1, "config: need at least one target and tap");
        require(target_range_max_m >= target_range_min_m, "config: bad target range interval");
        require(num_taps <= waveform.l_cp * (waveform.n - 1),
                "config: more taps than distinct delay-Doppler cells");
        require(waveform.has_both_directions(),
                "config: chirp schedule needs both an up and a down symbol");
    }
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

inline std::string format_double_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
        if (i) s += ',';
        s += buf;
    }
    return s;
}

}  // namespace detail

inline constexpr int kConfigVersion = 1;

inline ExperimentConfig parse_config_text(std::istream& in) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    bool versioned = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::stringstream ss(line);
        std::string key, value;
        if (!(ss >> key)) continue;
        std::getline(ss, value);
        const auto start = value.find_first_not_of(" \t=");
        value = start == std::string::npos ? "" : value.substr(start);
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t' ||
                                  value.back() == '\r'))
            value.pop_back();
        require(seen.insert(key).second,
                "config: duplicate key '" + key + "' at line " + std::to_string(lineno));
        require(!value.empty(), "config: missing value for '" + key + "'");

        auto& w = cfg.waveform;
        if (key == "config_version") {
            require(std::stoi(value) == kConfigVersion, "config: unsupported config_version");
            versioned = true;
        } else if (key == "m") w.m = std::stoul(value);
        else if (key == "n") w.n = std::stoul(value);
        else if (key == "l_cp") w.l_cp = std::stoul(value);
        else if (key == "bandwidth_hz") w.bandwidth_hz = std::stod(value);
        else if (key == "carrier_hz") w.carrier_hz = std::stod(value);
        else if (key == "sigma_d2") w.sigma_d2 = std::stod(value);
        else if (key == "qam_order") w.qam_order = std::stoul(value);
        else if (key == "symbols") w.symbols = std::stoul(value);
        else if (key == "cp_phase_shift") w.cp_phase_shift = (value == "true" || value == "1");
        else if (key == "num_targets") cfg.num_targets = std::stoul(value);
        else if (key == "target_range_min_m") cfg.target_range_min_m = std::stod(value);
        else if (key == "target_range_max_m") cfg.target_range_max_m = std::stod(value);
        else if (key == "target_vel_min_mps") cfg.target_vel_min_mps = std::stod(value);
        else if (key == "target_vel_max_mps") cfg.target_vel_max_mps = std::stod(value);
        else if (key == "num_taps") cfg.num_taps = std::stoul(value);
        else if (key == "snr_db_list") cfg.snr_db_list = detail::parse_double_list(value);
        else if (key == "psi_ratio_db_list")
            cfg.psi_ratio_db_list = detail::parse_double_list(value);
        else if (key == "trials") cfg.trials = std::stoul(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "detector_kappa") cfg.detector_kappa = std::stod(value);
        else fail("config: unknown key '" + key + "' at line " + std::to_string(lineno));
    }
    require(versioned, "config: missing config_version");
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "config: cannot open " + path);
    return parse_config_text(f);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    const auto& w = cfg.waveform;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "config_version " << kConfigVersion << '\n'
        << "m " << w.m << '\n'
        << "n " << w.n << '\n'
        << "l_cp " << w.l_cp << '\n'
        << "bandwidth_hz " << num(w.bandwidth_hz) << '\n'
        << "carrier_hz " << num(w.carrier_hz) << '\n'
        << "sigma_d2 " << num(w.sigma_d2) << '\n'
        << "qam_order " << w.qam_order << '\n'
        << "symbols " << w.symbols << '\n'
        << "cp_phase_shift " << (w.cp_phase_shift ? "true" : "false") << '\n'
        << "num_targets " << cfg.num_targets << '\n'
        << "target_range_min_m " << num(cfg.target_range_min_m) << '\n'
        << "target_range_max_m " << num(cfg.target_range_max_m) << '\n'
        << "target_vel_min_mps " << num(cfg.target_vel_min_mps) << '\n'
        << "target_vel_max_mps " << num(cfg.target_vel_max_mps) << '\n'
        << "num_taps " << cfg.num_taps << '\n'
        << "snr_db_list " << detail::format_double_list(cfg.snr_db_list) << '\n'
        << "psi_ratio_db_list " << detail::format_double_list(cfg.psi_ratio_db_list) << '\n'
        << "trials " << cfg.trials << '\n'
        << "seed " << cfg.seed << '\n'
        << "output_dir " << cfg.output_dir << '\n'
        << "detector_kappa " << num(cfg.detector_kappa) << '\n';
    return out.str();
}

}  // namespace jsac
