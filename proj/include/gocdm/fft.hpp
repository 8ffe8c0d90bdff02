// SPDX-License-Identifier: Apache-2.0
//
// gocdm - generalized chirp division multiplexing simulation toolkit
// Copyright (C) 2026 The gocdm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>

#include <fftw3.h>

#include "gocdm/types.hpp"

namespace gocdm {

namespace detail {

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per (size, sign) under a lock and reused afterwards.
class FftPlanCache
{
  public:
    static FftPlanCache &instance()
    {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan plan(std::size_t n, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;

        auto *in = fftw_alloc_complex(n);
        auto *out = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (p == nullptr)
            throw std::runtime_error("fft: plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    FftPlanCache(const FftPlanCache &) = delete;
    FftPlanCache &operator=(const FftPlanCache &) = delete;

  private:
    FftPlanCache() = default;
    ~FftPlanCache()
    {
        for (auto &[key, p] : plans_)
            fftw_destroy_plan(p);
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

} // namespace detail

/**
 * Unitary DFT.
 *
 * forward: out[k] = 1/sqrt(n) * sum_m in[m] e^{-j 2 pi m k / n}
 * inverse: out[k] = 1/sqrt(n) * sum_m in[m] e^{+j 2 pi m k / n}
 *
 * `in` and `out` must not alias.
 */
inline void dft(std::span<const cplx> in, std::span<cplx> out, Direction dir)
{
    const std::size_t n = in.size();
    if (out.size() != n)
        throw std::invalid_argument("dft: output length mismatch");
    if (n == 0)
        return;
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan p = detail::FftPlanCache::instance().plan(n, sign);
    // out-of-place c2c plans leave the input untouched
    auto *src = reinterpret_cast<fftw_complex *>(const_cast<cplx *>(in.data()));
    fftw_execute_dft(p, src, reinterpret_cast<fftw_complex *>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto &z : out)
        z *= scale;
}

inline cvec dft(std::span<const cplx> in, Direction dir)
{
    cvec out(in.size());
    dft(in, out, dir);
    return out;
}

} // namespace gocdm
