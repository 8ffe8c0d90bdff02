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
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "gocdm/fft.hpp"
#include "gocdm/transforms.hpp"
#include "gocdm/types.hpp"

namespace gocdm {

/**
 * Unit-energy symbol alphabet with Gray bit labels.
 *
 * Points are stored by label: point(g) is the symbol carrying the bit
 * pattern g (most significant bit first on the wire). 4-QAM uses
 *   00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2.
 */
class Constellation
{
  public:
    static Constellation qam4()
    {
        const double a = 1.0 / std::sqrt(2.0);
        return Constellation({{a, a}, {-a, a}, {a, -a}, {-a, -a}});
    }

    /// Gray-labelled M-PSK for any power-of-two order >= 2.
    static Constellation psk(std::size_t order)
    {
        if (order < 2 || !std::has_single_bit(order))
            throw std::invalid_argument("constellation: order must be a power of two >= 2");
        const double offset = order == 2 ? 0.0 : pi / static_cast<double>(order);
        cvec pts(order);
        for (std::size_t i = 0; i < order; ++i)
            pts[i ^ (i >> 1)] = cis(2.0 * pi * static_cast<double>(i) / static_cast<double>(order) + offset);
        return Constellation(std::move(pts));
    }

    /// 4 maps to the 4-QAM table; other powers of two to Gray PSK.
    static Constellation from_order(std::size_t order)
    {
        if (order == 4)
            return qam4();
        return psk(order);
    }

    std::size_t order() const { return points_.size(); }
    std::size_t bits_per_symbol() const { return static_cast<std::size_t>(std::countr_zero(points_.size())); }
    std::span<const cplx> points() const { return points_; }
    cplx point(std::size_t label) const { return points_.at(label); }

    /// Nearest point; ties go to the lowest label.
    std::size_t slice(cplx z) const
    {
        std::size_t best = 0;
        double best_d = std::norm(z - points_[0]);
        for (std::size_t i = 1; i < points_.size(); ++i)
        {
            const double d = std::norm(z - points_[i]);
            if (d < best_d)
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

  private:
    explicit Constellation(cvec pts) : points_(std::move(pts)) {}
    cvec points_;
};

using Bits = std::vector<std::uint8_t>;

inline cvec map_bits(std::span<const std::uint8_t> bits, const Constellation &c)
{
    const std::size_t k = c.bits_per_symbol();
    if (bits.size() % k != 0)
        throw std::invalid_argument("map_bits: bit count not divisible by bits per symbol");
    cvec symbols(bits.size() / k);
    for (std::size_t s = 0; s < symbols.size(); ++s)
    {
        std::size_t label = 0;
        for (std::size_t b = 0; b < k; ++b)
            label = (label << 1) | (bits[s * k + b] & 1u);
        symbols[s] = c.point(label);
    }
    return symbols;
}

/// Hard decision back to bits (slicing each symbol first).
inline Bits demap_symbols(std::span<const cplx> symbols, const Constellation &c)
{
    const std::size_t k = c.bits_per_symbol();
    Bits bits(symbols.size() * k);
    for (std::size_t s = 0; s < symbols.size(); ++s)
    {
        const std::size_t label = c.slice(symbols[s]);
        for (std::size_t b = 0; b < k; ++b)
            bits[s * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1u);
    }
    return bits;
}

enum class Mode { gocdm, ocdm, ofdm, sc };

inline std::string to_string(Mode mode)
{
    switch (mode)
    {
    case Mode::gocdm: return "gocdm";
    case Mode::ocdm: return "ocdm";
    case Mode::ofdm: return "ofdm";
    case Mode::sc: return "sc";
    }
    return "?";
}

inline Mode mode_from_string(const std::string &name)
{
    if (name == "gocdm") return Mode::gocdm;
    if (name == "ocdm") return Mode::ocdm;
    if (name == "ofdm") return Mode::ofdm;
    if (name == "sc") return Mode::sc;
    throw std::invalid_argument("unknown waveform mode: " + name);
}

/**
 * Block geometry. The block holds M*N samples without CP; OCDM and OFDM use
 * M = 1, SC uses N = 1. T = M*N*Ts and the subcarrier spacing 1/T are derived.
 */
struct FrameParams
{
    Mode mode = Mode::gocdm;
    std::size_t M = 1;
    std::size_t N = 1;
    std::size_t G = 0;
    double Ts = 1.0;
    Constellation constellation = Constellation::qam4();

    FrameParams(Mode mode_, std::size_t m, std::size_t n, std::size_t g, double ts,
                Constellation c = Constellation::qam4())
        : mode(mode_), M(m), N(n), G(g), Ts(ts), constellation(std::move(c))
    {
        if (M == 0 || N == 0)
            throw std::invalid_argument("frame: M and N must be positive");
        if (!(Ts > 0.0))
            throw std::invalid_argument("frame: sampling interval must be positive");
        if ((mode == Mode::ocdm || mode == Mode::ofdm) && M != 1)
            throw std::invalid_argument("frame: " + to_string(mode) + " requires M = 1");
        if (mode == Mode::sc && N != 1)
            throw std::invalid_argument("frame: sc requires N = 1");
    }

    std::size_t size() const { return M * N; }
    double duration() const { return static_cast<double>(size()) * Ts; }
    double subcarrier_spacing() const { return 1.0 / duration(); }

    /// e.g. "gocdm_m8_n16", "ocdm_n128", "sc_m128"
    std::string label() const
    {
        switch (mode)
        {
        case Mode::gocdm: return "gocdm_m" + std::to_string(M) + "_n" + std::to_string(N);
        case Mode::ocdm: return "ocdm_n" + std::to_string(N);
        case Mode::ofdm: return "ofdm_n" + std::to_string(N);
        case Mode::sc: return "sc_m" + std::to_string(M);
        }
        return "?";
    }
};

/// Receiver-side transform of the mode (forward) or the transmitter side (inverse).
inline cvec waveform_transform(const FrameParams &p, std::span<const cplx> v, Direction dir)
{
    if (v.size() != p.size())
        throw std::invalid_argument("waveform: vector length must equal M*N");
    switch (p.mode)
    {
    case Mode::ofdm: return dft(v, dir);
    case Mode::sc: return cvec(v.begin(), v.end());
    case Mode::gocdm:
    case Mode::ocdm: return gdfnt_apply(GdfntParams{p.M, p.N}, v, dir);
    }
    throw std::logic_error("waveform: bad mode");
}

struct TxBlock
{
    cvec x;    // GF-domain data symbols
    cvec s;    // time domain, no CP
    cvec s_cp; // G-sample cyclic prefix followed by s
};

inline TxBlock modulate(const FrameParams &p, std::span<const cplx> x)
{
    if (x.size() != p.size())
        throw std::invalid_argument("modulate: symbol count must equal M*N");
    if (p.G > p.size())
        throw std::invalid_argument("modulate: cyclic prefix longer than the block");
    TxBlock blk;
    blk.x.assign(x.begin(), x.end());
    blk.s = waveform_transform(p, x, Direction::inverse);
    blk.s_cp.reserve(p.G + p.size());
    blk.s_cp.insert(blk.s_cp.end(), blk.s.end() - static_cast<std::ptrdiff_t>(p.G), blk.s.end());
    blk.s_cp.insert(blk.s_cp.end(), blk.s.begin(), blk.s.end());
    return blk;
}

/// Drop the CP and apply the forward transform of the mode.
inline cvec rx_front(const FrameParams &p, std::span<const cplx> r_cp)
{
    if (r_cp.size() != p.G + p.size())
        throw std::invalid_argument("rx_front: expected G + M*N samples");
    return waveform_transform(p, r_cp.subspan(p.G), Direction::forward);
}

/// max|s_n|^2 / mean|s_n|^2 over the CP-free block.
inline double papr(std::span<const cplx> s)
{
    if (s.empty())
        throw std::invalid_argument("papr: empty block");
    double peak = 0.0;
    double total = 0.0;
    for (const auto &z : s)
    {
        const double e = std::norm(z);
        peak = std::max(peak, e);
        total += e;
    }
    if (total <= 0.0)
        throw std::domain_error("papr: zero-energy block");
    return peak / (total / static_cast<double>(s.size()));
}

} // namespace gocdm
