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

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gocdm/channel.hpp"
#include "gocdm/transforms.hpp"
#include "gocdm/types.hpp"
#include "gocdm/waveform.hpp"

namespace gocdm {

/**
 * Exact effective channel H_eff = T H T^H where T is the receiver transform
 * of the mode (GDFnT, DFT or identity). Built column by column through the
 * fast transforms; O((MN)^2 log N). Dense, so limited to MN <= 1024.
 */
inline cmat dense_heff(const FrameParams &p, const ChannelRealization &ch)
{
    ch.validate();
    const std::size_t MN = p.size();
    if (ch.block_size != MN)
        throw std::invalid_argument("dense_heff: channel drawn for a different block size");
    if (MN > 1024)
        throw std::length_error("dense_heff: block too large for a dense matrix");

    const auto ramps = doppler_ramps(ch);
    cmat H(MN, MN);
    cvec e(MN, cplx{});
    for (std::size_t q = 0; q < MN; ++q)
    {
        e[q] = 1.0;
        const cvec s = waveform_transform(p, e, Direction::inverse);
        const cvec y = waveform_transform(p, channel_response(ch, ramps, s), Direction::forward);
        for (std::size_t r = 0; r < MN; ++r)
            H(r, q) = y[r];
        e[q] = 0.0;
    }
    return H;
}

/**
 * Coefficient of the b-th integer-Doppler basis vector in the expansion of a
 * fractional Doppler ramp e^{j 2 pi kappa n / MN}:
 *
 *   lambda_b = 1/MN (e^{j 2 pi kappa} - 1) / (e^{j 2 pi (kappa - b)/MN} - 1)
 *
 * kappa = 0 gives the Kronecker delta at b = 0.
 */
inline cplx lambda_coeff(double kappa, int b, std::size_t MN)
{
    if (kappa == 0.0)
        return b == 0 ? cplx{1.0, 0.0} : cplx{};
    const double n = static_cast<double>(MN);
    const cplx num = cis(2.0 * pi * kappa) - 1.0;
    const cplx den = cis(2.0 * pi * (kappa - static_cast<double>(b)) / n) - 1.0;
    if (std::abs(den) == 0.0)
        throw std::domain_error("lambda_coeff: kappa coincides with a basis frequency");
    return num / (n * den);
}

/// lambda_b for b = -B..B, or the single value {1} when kappa = 0.
inline cvec lambda_coeffs(double kappa, std::size_t B, std::size_t MN)
{
    if (MN == 0)
        throw std::invalid_argument("lambda_coeffs: MN must be positive");
    if (kappa == 0.0)
        return {cplx{1.0, 0.0}};
    const int bb = static_cast<int>(B);
    cvec out;
    out.reserve(2 * B + 1);
    for (int b = -bb; b <= bb; ++b)
        out.push_back(lambda_coeff(kappa, b, MN));
    return out;
}

/// A (path, basis offset) pair of the fractional-Doppler expansion.
struct VirtualPath
{
    std::size_t path = 0;
    int offset = 0;  // b
    cplx lambda{1.0, 0.0};
    std::size_t shift = 0; // <l + (k+b) M>_MN
};

/// Offsets b actually used for truncation B: [-B, B] clipped to the MN distinct
/// basis frequencies [-floor(MN/2), MN - 1 - floor(MN/2)].
inline std::pair<int, int> basis_offsets(std::size_t B, std::size_t MN)
{
    const auto half = static_cast<std::int64_t>(MN / 2);
    const auto bb = static_cast<std::int64_t>(B);
    const std::int64_t lo = std::max(-bb, -half);
    const std::int64_t hi = std::min(bb, static_cast<std::int64_t>(MN) - 1 - half);
    return {static_cast<int>(lo), static_cast<int>(hi)};
}

/// Truncation B per path; paths with integer Doppler always get B = 0.
inline std::vector<VirtualPath> virtual_paths(const FrameParams &p, const ChannelRealization &ch,
                                              std::span<const std::size_t> truncation)
{
    if (truncation.size() != ch.paths.size())
        throw std::invalid_argument("virtual_paths: one truncation value per path expected");
    const std::size_t MN = p.size();
    const auto M = static_cast<std::int64_t>(p.M);
    std::vector<VirtualPath> out;
    for (std::size_t i = 0; i < ch.paths.size(); ++i)
    {
        const auto &path = ch.paths[i];
        const std::size_t B = path.doppler_frac == 0.0 ? 0 : truncation[i];
        const auto [lo, hi] = basis_offsets(B, MN);
        for (int b = lo; b <= hi; ++b)
        {
            VirtualPath v;
            v.path = i;
            v.offset = b;
            v.lambda = lambda_coeff(path.doppler_frac, b, MN);
            v.shift = wrap(static_cast<std::int64_t>(path.delay) + (path.doppler_int + b) * M, MN);
            out.push_back(v);
        }
    }
    return out;
}

/**
 * Sparse GF-domain channel: row p holds L nonzeros, the l-th one in column
 * <p - d_l>_MN with value coeff(p, l). Coefficients are stored as an MN x L
 * row-major table.
 */
class SparseGfChannel
{
  public:
    SparseGfChannel(std::size_t mn, std::vector<std::size_t> shifts)
        : mn_(mn), shifts_(std::move(shifts)), coeff_(mn * shifts_.size(), cplx{})
    {
        if (mn_ == 0)
            throw std::invalid_argument("sparse channel: zero dimension");
        if (shifts_.empty())
            throw std::invalid_argument("sparse channel: no shift groups");
        auto sorted = shifts_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("sparse channel: shifts must be distinct");
        if (sorted.back() >= mn_)
            throw std::invalid_argument("sparse channel: shift out of range");
    }

    std::size_t size() const { return mn_; }
    std::size_t groups() const { return shifts_.size(); }
    std::span<const std::size_t> shifts() const { return shifts_; }
    std::size_t shift(std::size_t l) const { return shifts_[l]; }

    cplx coeff(std::size_t p, std::size_t l) const { return coeff_[p * shifts_.size() + l]; }
    cplx &coeff(std::size_t p, std::size_t l) { return coeff_[p * shifts_.size() + l]; }

    /// Column index <p - d_l>_MN of the l-th nonzero in row p.
    std::size_t column(std::size_t p, std::size_t l) const
    {
        return wrap(static_cast<std::int64_t>(p) - static_cast<std::int64_t>(shifts_[l]), mn_);
    }

    cmat dense() const
    {
        cmat H = cmat::Zero(mn_, mn_);
        for (std::size_t p = 0; p < mn_; ++p)
            for (std::size_t l = 0; l < groups(); ++l)
                H(p, column(p, l)) += coeff(p, l);
        return H;
    }

    cvec apply(std::span<const cplx> x) const
    {
        if (x.size() != mn_)
            throw std::invalid_argument("sparse channel: vector length mismatch");
        cvec y(mn_, cplx{});
        for (std::size_t p = 0; p < mn_; ++p)
            for (std::size_t l = 0; l < groups(); ++l)
                y[p] += coeff(p, l) * x[column(p, l)];
        return y;
    }

  private:
    std::size_t mn_;
    std::vector<std::size_t> shifts_;
    cvec coeff_;
};

/// Restriction of a dense matrix to the given circulant diagonals.
inline SparseGfChannel sparse_from_dense(const cmat &H, std::vector<std::size_t> shifts)
{
    if (H.rows() != H.cols())
        throw std::invalid_argument("sparse_from_dense: matrix must be square");
    SparseGfChannel sg(static_cast<std::size_t>(H.rows()), std::move(shifts));
    for (std::size_t p = 0; p < sg.size(); ++p)
        for (std::size_t l = 0; l < sg.groups(); ++l)
            sg.coeff(p, l) = H(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(sg.column(p, l)));
    return sg;
}

namespace detail {

// Chirp exponent f(n) with [Phi_N]_{n,.}[Phi_N^H]_{.,n'} phases reducing to
// e^{j pi (f(n) - f(n')) / N}: n^2 for even N, n^2 - n for odd N. Returned mod 2N.
inline std::int64_t chirp_exponent(std::int64_t n, std::size_t N)
{
    const auto twoN = static_cast<std::int64_t>(2 * N);
    const std::int64_t r = n % twoN;
    const std::int64_t f = N % 2 == 0 ? r * r : r * r - r;
    return ((f % twoN) + twoN) % twoN;
}

} // namespace detail

/**
 * Sparse approximation of H_eff for the GDFnT modes (GOCDM, OCDM, SC).
 *
 * Every virtual path (i, b) cyclically shifts the symbol vector by
 * d = <l_i + (k_i+b) M>_MN; virtual paths with equal shifts form one group.
 * For row p, column p' = <p - d_l>, the group coefficient is
 *
 *   sum_{(i,b)} h_i lambda_{i,b} e^{j pi (f(floor(p/M)) - f(floor((p'+l_i)/M))) / N}
 *                                e^{j 2 pi (k_i+b) <p>_M / MN}
 *
 * with f(n) = n^2 for even N (n^2 - n for odd N). Exact when all Dopplers are
 * integers. OFDM has no closed form here and is handled by restricting the
 * dense matrix to the diagonals <k_i + b>.
 */
inline SparseGfChannel sparse_heff(const FrameParams &p, const ChannelRealization &ch,
                                   std::span<const std::size_t> truncation)
{
    ch.validate();
    const std::size_t MN = p.size();
    if (ch.block_size != MN)
        throw std::invalid_argument("sparse_heff: channel drawn for a different block size");

    if (p.mode == Mode::ofdm)
    {
        std::vector<std::size_t> shifts;
        for (std::size_t i = 0; i < ch.paths.size(); ++i)
        {
            const auto &path = ch.paths[i];
            const auto [lo, hi] = basis_offsets(path.doppler_frac == 0.0 ? 0 : truncation[i], MN);
            for (int b = lo; b <= hi; ++b)
                shifts.push_back(wrap(path.doppler_int + b, MN));
        }
        std::sort(shifts.begin(), shifts.end());
        shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
        return sparse_from_dense(dense_heff(p, ch), std::move(shifts));
    }

    const auto vpaths = virtual_paths(p, ch, truncation);
    std::vector<std::size_t> shifts;
    for (const auto &v : vpaths)
        shifts.push_back(v.shift);
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());

    std::map<std::size_t, std::size_t> group_of;
    for (std::size_t l = 0; l < shifts.size(); ++l)
        group_of[shifts[l]] = l;

    const auto M = static_cast<std::int64_t>(p.M);
    const std::size_t N = p.N;
    const auto imn = static_cast<std::int64_t>(MN);
    SparseGfChannel sg(MN, shifts);
    for (const auto &v : vpaths)
    {
        const auto &path = ch.paths[v.path];
        const std::size_t l = group_of.at(v.shift);
        const cplx weight = path.gain * v.lambda;
        const std::int64_t doppler = path.doppler_int + v.offset;
        for (std::size_t row = 0; row < MN; ++row)
        {
            const auto pr = static_cast<std::int64_t>(row);
            const std::size_t col = sg.column(row, l);
            const std::int64_t n_row = pr / M;
            const std::int64_t n_col = (static_cast<std::int64_t>(col) + static_cast<std::int64_t>(path.delay)) / M;
            const std::int64_t chirp = detail::chirp_exponent(n_row, N) - detail::chirp_exponent(n_col, N);
            const std::int64_t dop = wrap(doppler * (pr % M), MN);
            const double phase = pi * static_cast<double>(chirp) / static_cast<double>(N) +
                                 2.0 * pi * static_cast<double>(dop) / static_cast<double>(imn);
            sg.coeff(row, l) += weight * cis(phase);
        }
    }
    return sg;
}

/// Same truncation B for every fractional-Doppler path.
inline SparseGfChannel sparse_heff(const FrameParams &p, const ChannelRealization &ch, std::size_t B)
{
    const std::vector<std::size_t> truncation(ch.paths.size(), B);
    return sparse_heff(p, ch, truncation);
}

struct IndexVectors
{
    std::vector<std::size_t> b; // symbols observed by y[p]: <p - d_l>
    std::vector<std::size_t> q; // observations touched by x[p]: <p + d_l>
};

inline IndexVectors index_vectors(const SparseGfChannel &sg, std::size_t p)
{
    if (p >= sg.size())
        throw std::out_of_range("index_vectors: index out of range");
    IndexVectors iv;
    iv.b.reserve(sg.groups());
    iv.q.reserve(sg.groups());
    for (std::size_t l = 0; l < sg.groups(); ++l)
    {
        iv.b.push_back(sg.column(p, l));
        iv.q.push_back(wrap(static_cast<std::int64_t>(p) + static_cast<std::int64_t>(sg.shift(l)), sg.size()));
    }
    return iv;
}

/// Forward cyclic shift matrix: (Pi s)[n] = s[<n-1>_n].
inline cmat cyclic_shift_matrix(std::size_t n)
{
    cmat P = cmat::Zero(n, n);
    for (std::size_t r = 0; r < n; ++r)
        P(r, wrap(static_cast<std::int64_t>(r) - 1, n)) = 1.0;
    return P;
}

/// Induced infinity norm of Pi Theta^H - Theta^H Pi.
inline double verify_lemma1(std::size_t M, std::size_t N)
{
    const GdfntParams params{M, N};
    const cmat thetaH = gdfnt_matrix(params).adjoint();
    const cmat P = cyclic_shift_matrix(params.size());
    const cmat diff = P * thetaH - thetaH * P;
    return diff.rowwise().lpNorm<1>().maxCoeff();
}

} // namespace gocdm
