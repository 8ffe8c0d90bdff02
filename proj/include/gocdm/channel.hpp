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
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gocdm/types.hpp"
#include "gocdm/waveform.hpp"

namespace gocdm {

struct Tap
{
    double delay = 0.0;    // seconds
    double power_db = 0.0; // mean power relative to the first tap
};

/**
 * Delay-power profile of a multi-lag multi-Doppler channel plus the signal
 * settings it is paired with (bandwidth, guard interval, block length).
 */
struct ChannelProfile
{
    std::string name;
    double carrier = 0.0;    // f_c, Hz
    double wave_speed = 0.0; // C, m/s
    double speed = 0.0;      // V, m/s
    double bandwidth = 0.0;  // Hz, sampling rate 1/Ts
    std::vector<Tap> taps;
    double guard_interval = 0.0;  // seconds
    std::size_t block_samples = 0; // MN used with this profile, 0 if unspecified

    double max_doppler() const { return speed * carrier / wave_speed; }
    double sampling_interval() const { return 1.0 / bandwidth; }
    std::size_t cp_samples() const { return static_cast<std::size_t>(std::floor(guard_interval * bandwidth + 0.5)); }

    /// Linear tap powers scaled to unit sum.
    std::vector<double> normalized_powers() const
    {
        std::vector<double> p;
        p.reserve(taps.size());
        double total = 0.0;
        for (const auto &t : taps)
        {
            p.push_back(std::pow(10.0, t.power_db / 10.0));
            total += p.back();
        }
        for (auto &v : p)
            v /= total;
        return p;
    }

    void validate() const
    {
        if (taps.empty())
            throw std::invalid_argument("profile " + name + ": no taps");
        if (!(carrier > 0.0) || !(wave_speed > 0.0) || !(bandwidth > 0.0) || speed < 0.0)
            throw std::invalid_argument("profile " + name + ": carrier, wave speed and bandwidth must be positive, speed non-negative");
        for (const auto &t : taps)
            if (t.delay < 0.0)
                throw std::invalid_argument("profile " + name + ": negative tap delay");
    }
};

/// Underwater acoustic profile: 24 kHz carrier, 3.2 kHz bandwidth, 40 km/h, 10 taps.
inline ChannelProfile uwa_table2()
{
    ChannelProfile p;
    p.name = "uwa_table2";
    p.carrier = 24e3;
    p.wave_speed = 1500.0;
    p.speed = 40.0 / 3.6;
    p.bandwidth = 3.2e3;
    p.guard_interval = 15e-3;
    p.block_samples = 128;
    const double delays_ms[] = {0.0, 0.6, 1.3, 2.2, 6.9, 7.5, 8.1, 13.1, 13.8, 14.7};
    const double powers_db[] = {0.0, -0.6, -1.0, -1.3, -2.8, -4.2, -3.5, -6.2, -7.3, -8.1};
    for (std::size_t i = 0; i < std::size(delays_ms); ++i)
        p.taps.push_back({delays_ms[i] * 1e-3, powers_db[i]});
    return p;
}

/// Extended Vehicular A: 5 GHz carrier, 15.36 MHz bandwidth, 500 km/h.
inline ChannelProfile eva_table4()
{
    ChannelProfile p;
    p.name = "eva_table4";
    p.carrier = 5e9;
    p.wave_speed = 3e8;
    p.speed = 500.0 / 3.6;
    p.bandwidth = 15.36e6;
    p.guard_interval = 2.6e-6;
    p.block_samples = 256;
    const double delays_ns[] = {0, 30, 150, 310, 370, 710, 1090, 1730, 2510};
    const double powers_db[] = {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9};
    for (std::size_t i = 0; i < std::size(delays_ns); ++i)
        p.taps.push_back({delays_ns[i] * 1e-9, powers_db[i]});
    return p;
}

inline ChannelProfile builtin_profile(const std::string &name)
{
    if (name == "uwa_table2")
        return uwa_table2();
    if (name == "eva_table4")
        return eva_table4();
    throw std::invalid_argument("unknown built-in profile: " + name);
}

struct Spreads
{
    double time = 0.0;    // S_t, seconds
    double doppler = 0.0; // S_f, Hz
    double product() const { return time * doppler; }
};

/// S_t = largest tap delay, S_f = 2 v_max.
inline Spreads spreads(const ChannelProfile &profile)
{
    Spreads s;
    for (const auto &t : profile.taps)
        s.time = std::max(s.time, t.delay);
    s.doppler = 2.0 * profile.max_doppler();
    return s;
}

/// v_max * T for the given block.
inline double normalized_max_doppler(const ChannelProfile &profile, const FrameParams &p)
{
    return profile.max_doppler() * p.duration();
}

/**
 * One propagation path in sample units. The gain already carries the
 * e^{-j 2 pi (k+kappa) l / MN} phase so that
 *   r[n] = sum_i gain_i e^{j 2 pi (k_i+kappa_i) n / MN} s[<n - l_i>_MN].
 */
struct PathRealization
{
    cplx gain{1.0, 0.0};
    std::size_t delay = 0;
    int doppler_int = 0;
    double doppler_frac = 0.0; // in (-0.5, 0.5]

    double doppler() const { return static_cast<double>(doppler_int) + doppler_frac; }
};

struct ChannelRealization
{
    std::vector<PathRealization> paths;
    std::size_t block_size = 0; // MN

    std::size_t max_delay() const
    {
        std::size_t l = 0;
        for (const auto &p : paths)
            l = std::max(l, p.delay);
        return l;
    }

    bool integer_doppler() const
    {
        return std::all_of(paths.begin(), paths.end(), [](const auto &p) { return p.doppler_frac == 0.0; });
    }

    void validate() const
    {
        if (paths.empty())
            throw std::invalid_argument("channel: no paths");
        if (block_size == 0)
            throw std::invalid_argument("channel: zero block size");
        for (const auto &p : paths)
            if (!(p.doppler_frac > -0.5 && p.doppler_frac <= 0.5))
                throw std::invalid_argument("channel: fractional Doppler outside (-0.5, 0.5]");
    }
};

/// Split a normalized Doppler nu into k + kappa with kappa in (-0.5, 0.5].
inline std::pair<int, double> split_doppler(double nu)
{
    const double k = std::ceil(nu - 0.5);
    return {static_cast<int>(k), nu - k};
}

/// Nearest-sample delay, ties toward +infinity.
inline std::size_t delay_samples(double delay, double Ts)
{
    return static_cast<std::size_t>(std::floor(delay / Ts + 0.5));
}

/**
 * Draws one block-fading realization: circular Gaussian gains with the
 * normalized tap powers, arrival angles uniform on [-pi/2, pi/2], Doppler
 * v_max cos(theta) split into integer and fractional parts of v*T.
 */
template <class Rng>
ChannelRealization draw_channel(const ChannelProfile &profile, const FrameParams &p, Rng &rng)
{
    profile.validate();
    if (std::abs(p.Ts * profile.bandwidth - 1.0) > 1e-9)
        throw std::invalid_argument("draw_channel: frame sampling interval does not match profile bandwidth");

    const auto powers = profile.normalized_powers();
    const double vmax = profile.max_doppler();
    const double T = p.duration();
    const double MN = static_cast<double>(p.size());

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-pi / 2.0, pi / 2.0);

    ChannelRealization ch;
    ch.block_size = p.size();
    ch.paths.reserve(profile.taps.size());
    for (std::size_t i = 0; i < profile.taps.size(); ++i)
    {
        const std::size_t l = delay_samples(profile.taps[i].delay, p.Ts);
        if (l > p.G)
            throw std::invalid_argument("draw_channel: tap delay of " + std::to_string(l) +
                                        " samples exceeds the cyclic prefix " + std::to_string(p.G));
        const double sigma = std::sqrt(powers[i] / 2.0);
        const double re = gauss(rng);
        const double im = gauss(rng);
        const cplx h{sigma * re, sigma * im};
        const double nu = vmax * std::cos(angle(rng)) * T;
        const auto [k, kappa] = split_doppler(nu);

        PathRealization path;
        path.delay = l;
        path.doppler_int = k;
        path.doppler_frac = kappa;
        path.gain = h * cis(-2.0 * pi * nu * static_cast<double>(l) / MN);
        ch.paths.push_back(path);
    }
    return ch;
}

/// Per-path Doppler phase ramps e^{j 2 pi nu n / MN}, n = 0..MN-1.
inline std::vector<cvec> doppler_ramps(const ChannelRealization &ch)
{
    const std::size_t MN = ch.block_size;
    std::vector<cvec> ramps;
    ramps.reserve(ch.paths.size());
    for (const auto &path : ch.paths)
    {
        cvec r(MN);
        for (std::size_t n = 0; n < MN; ++n)
        {
            // integer part reduced mod MN to keep the phase argument small
            const double whole = static_cast<double>(wrap(static_cast<std::int64_t>(path.doppler_int) *
                                                              static_cast<std::int64_t>(n), MN));
            const double frac = path.doppler_frac * static_cast<double>(n);
            r[n] = cis(2.0 * pi * (whole + frac) / static_cast<double>(MN));
        }
        ramps.push_back(std::move(r));
    }
    return ramps;
}

/// Noise-free channel action on a CP-free block (the CP turns delays into cyclic shifts).
inline cvec channel_response(const ChannelRealization &ch, const std::vector<cvec> &ramps, std::span<const cplx> s)
{
    const std::size_t MN = ch.block_size;
    if (s.size() != MN)
        throw std::invalid_argument("apply_channel: block length mismatch");
    cvec r(MN, cplx{});
    for (std::size_t i = 0; i < ch.paths.size(); ++i)
    {
        const auto &path = ch.paths[i];
        const cvec &ramp = ramps[i];
        for (std::size_t n = 0; n < MN; ++n)
            r[n] += path.gain * ramp[n] * s[wrap(static_cast<std::int64_t>(n) - static_cast<std::int64_t>(path.delay), MN)];
    }
    return r;
}

/// Adds i.i.d. circular Gaussian noise of variance N0 per sample.
template <class Rng>
void add_noise(cvec &r, double N0, Rng &rng)
{
    if (N0 < 0.0)
        throw std::invalid_argument("noise variance must be non-negative");
    if (N0 == 0.0)
        return;
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = std::sqrt(N0 / 2.0);
    for (auto &z : r)
    {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z += cplx{sigma * re, sigma * im};
    }
}

/**
 * r[n] = sum_i gain_i e^{j 2 pi (k_i+kappa_i) n/MN} s[<n-l_i>_MN] + w[n].
 * `max_cp` is the CP length the block was sent with; every delay must fit in it.
 */
template <class Rng>
cvec apply_channel(const ChannelRealization &ch, std::span<const cplx> s, double N0, Rng &rng,
                   std::size_t max_cp)
{
    ch.validate();
    if (ch.max_delay() > max_cp)
        throw std::invalid_argument("apply_channel: path delay exceeds the cyclic prefix");
    cvec r = channel_response(ch, doppler_ramps(ch), s);
    add_noise(r, N0, rng);
    return r;
}

/// Variant for a block sent with a CP at least as long as the delay spread.
template <class Rng>
cvec apply_channel(const ChannelRealization &ch, std::span<const cplx> s, double N0, Rng &rng)
{
    return apply_channel(ch, s, N0, rng, ch.max_delay());
}

/// Time-domain channel matrix H = sum_i gain_i Lambda^{k_i+kappa_i} Pi^{l_i}.
inline cmat dense_h(const ChannelRealization &ch)
{
    ch.validate();
    const std::size_t MN = ch.block_size;
    const auto ramps = doppler_ramps(ch);
    cmat H = cmat::Zero(MN, MN);
    for (std::size_t i = 0; i < ch.paths.size(); ++i)
        for (std::size_t n = 0; n < MN; ++n)
            H(n, wrap(static_cast<std::int64_t>(n) - static_cast<std::int64_t>(ch.paths[i].delay), MN)) +=
                ch.paths[i].gain * ramps[i][n];
    return H;
}

} // namespace gocdm
