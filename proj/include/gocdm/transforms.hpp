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

#include <span>
#include <stdexcept>

#include "gocdm/fft.hpp"
#include "gocdm/types.hpp"

/**
 * Discrete Fresnel transform (DFnT) and its generalization (GDFnT).
 *
 * The N-point DFnT matrix Phi_N is circulant with entries
 *
 *   [Phi_N]_{n,n'} = 1/sqrt(N) e^{-j pi/4} e^{j pi (n'-n)^2 / N}          (N even)
 *   [Phi_N]_{n,n'} = 1/sqrt(N) e^{-j pi/4} e^{j pi (n'-n+1/2)^2 / N}      (N odd)
 *
 * and the GDFnT of size MN is Theta_{M,N} = Phi_N (x) I_M. Both are unitary.
 * Vectors of length MN are read column-wise into an M x N matrix, so entry
 * p = n*M + m belongs to row m and column n.
 */
namespace gocdm {

struct GdfntParams
{
    std::size_t M = 1;
    std::size_t N = 1;

    GdfntParams(std::size_t m, std::size_t n) : M(m), N(n)
    {
        if (M == 0 || N == 0)
            throw std::invalid_argument("gdfnt: M and N must be positive");
    }

    std::size_t size() const { return M * N; }
};

/// Phi_N[0][t] for t = 0..N-1; by the circulant structure Phi_N[n][n'] = kernel[<n'-n>_N].
inline cvec dfnt_kernel(std::size_t N)
{
    if (N == 0)
        throw std::invalid_argument("dfnt: N must be positive");
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    const auto twoN = static_cast<std::int64_t>(2 * N);
    cvec kernel(N);
    for (std::size_t t = 0; t < N; ++t)
    {
        const auto d = static_cast<std::int64_t>(t);
        // reduce the quadratic phase exactly in integers before going to floating point
        double phase;
        if (N % 2 == 0)
            phase = pi * static_cast<double>((d * d) % twoN) / static_cast<double>(N);
        else
            phase = pi * (static_cast<double>((d * d + d) % twoN) + 0.25) / static_cast<double>(N);
        kernel[t] = scale * cis(phase - pi / 4.0);
    }
    return kernel;
}

inline cmat dfnt_matrix(std::size_t N)
{
    const cvec kernel = dfnt_kernel(N);
    cmat phi(N, N);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t k = 0; k < N; ++k)
            phi(n, k) = kernel[wrap(static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n), N)];
    return phi;
}

/// Dense Theta_{M,N} = Phi_N (x) I_M. Meant for oracles and small blocks.
inline cmat gdfnt_matrix(const GdfntParams &params)
{
    const cmat phi = dfnt_matrix(params.N);
    const std::size_t M = params.M;
    cmat theta = cmat::Zero(params.size(), params.size());
    for (std::size_t n = 0; n < params.N; ++n)
        for (std::size_t k = 0; k < params.N; ++k)
            for (std::size_t m = 0; m < M; ++m)
                theta(n * M + m, k * M + m) = phi(n, k);
    return theta;
}

/// O(N^2) circulant product with Phi_N (forward) or Phi_N^H (inverse). Any N.
inline cvec dfnt_direct(std::span<const cplx> a, Direction dir)
{
    const std::size_t N = a.size();
    const cvec kernel = dfnt_kernel(N);
    cvec out(N, cplx{});
    for (std::size_t n = 0; n < N; ++n)
    {
        cplx acc{};
        for (std::size_t k = 0; k < N; ++k)
        {
            const auto diff = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n);
            if (dir == Direction::forward)
                acc += kernel[wrap(diff, N)] * a[k];
            else
                acc += std::conj(kernel[wrap(-diff, N)]) * a[k];
        }
        out[n] = acc;
    }
    return out;
}

/**
 * Fast DFnT for even N through the chirp-FFT-chirp factorization
 *
 *   Phi_N   = diag(theta2) F_N   diag(theta1)
 *   Phi_N^H = diag(theta1)^H F_N^H diag(theta2)^H
 *
 * with [theta1]_m = e^{-j pi/4} e^{j pi m^2/N} and [theta2]_m = e^{j pi m^2/N}.
 * Odd N is rejected; use dfnt_direct there.
 */
inline cvec dfnt_via_fft(std::span<const cplx> a, Direction dir)
{
    const std::size_t N = a.size();
    if (N == 0 || N % 2 != 0)
        throw std::invalid_argument("dfnt_via_fft: N must be even and positive");

    const auto twoN = static_cast<std::int64_t>(2 * N);
    cvec chirp(N);
    for (std::size_t m = 0; m < N; ++m)
    {
        const auto mm = static_cast<std::int64_t>(m);
        chirp[m] = cis(pi * static_cast<double>((mm * mm) % twoN) / static_cast<double>(N));
    }
    const cplx rot = cis(-pi / 4.0);

    cvec tmp(N);
    cvec out(N);
    if (dir == Direction::forward)
    {
        for (std::size_t m = 0; m < N; ++m)
            tmp[m] = rot * chirp[m] * a[m];
        dft(tmp, out, Direction::forward);
        for (std::size_t m = 0; m < N; ++m)
            out[m] *= chirp[m];
    }
    else
    {
        for (std::size_t m = 0; m < N; ++m)
            tmp[m] = std::conj(chirp[m]) * a[m];
        dft(tmp, out, Direction::inverse);
        for (std::size_t m = 0; m < N; ++m)
            out[m] *= std::conj(rot * chirp[m]);
    }
    return out;
}

/// N-point DFnT, FFT path for even N and the direct product otherwise.
inline cvec dfnt_apply(std::span<const cplx> a, Direction dir)
{
    if (a.size() % 2 == 0)
        return dfnt_via_fft(a, dir);
    return dfnt_direct(a, dir);
}

/**
 * Theta_{M,N} a (forward) or Theta_{M,N}^H a (inverse) without forming the
 * MN x MN matrix: reshape column-wise into M x N, transform each row with the
 * N-point DFnT, read back column-wise.
 */
inline cvec gdfnt_apply(const GdfntParams &params, std::span<const cplx> a, Direction dir)
{
    const std::size_t M = params.M;
    const std::size_t N = params.N;
    if (a.size() != params.size())
        throw std::invalid_argument("gdfnt_apply: vector length must equal M*N");
    if (N == 1)
        return cvec(a.begin(), a.end());

    cvec out(a.size());
    cvec row(N);
    for (std::size_t m = 0; m < M; ++m)
    {
        for (std::size_t n = 0; n < N; ++n)
            row[n] = a[n * M + m];
        const cvec t = dfnt_apply(row, dir);
        for (std::size_t n = 0; n < N; ++n)
            out[n * M + m] = t[n];
    }
    return out;
}

} // namespace gocdm
