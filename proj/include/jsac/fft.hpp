// SPDX-License-Identifier: Apache-2.0
#pragma once

// Thin unitary-FFT wrapper over FFTW with a process-wide plan cache.
// FFTW planning is not thread-safe, so plan creation is serialized; execution
// uses fftw_execute_dft on thread-local buffers and is re-entrant.

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "jsac/common.hpp"

namespace jsac::detail {

class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache c;
        return c;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        cvec tmp(n);
        auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

/// In-place DFT with 1/sqrt(n) scaling; sign FFTW_FORWARD or FFTW_BACKWARD.
inline void unitary_fft_inplace(cvec& v, int sign) {
    const std::size_t n = v.size();
    fftw_plan p = FftPlanCache::instance().get(n, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(p, buf, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& x : v) x *= scale;
}

}  // namespace jsac::detail
