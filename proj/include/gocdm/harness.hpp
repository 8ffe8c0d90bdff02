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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gocdm/channel.hpp"
#include "gocdm/detect.hpp"
#include "gocdm/gf_channel.hpp"
#include "gocdm/waveform.hpp"

namespace gocdm {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------- seeding

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Pure function of the master seed and a key path.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t h = splitmix64(master);
    for (auto k : keys)
        h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

/// Independent sub-streams of one trial.
enum class Stream : std::uint64_t { channel = 1, bits = 2, noise = 3 };

inline Rng trial_rng(std::uint64_t master, std::size_t point, std::size_t trial, Stream stream)
{
    return Rng(derive_seed(master, {point, trial, static_cast<std::uint64_t>(stream)}));
}

inline Bits random_bits(std::size_t count, Rng &rng)
{
    Bits bits(count);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < count; ++i)
    {
        if (i % 64 == 0)
            word = rng();
        bits[i] = static_cast<std::uint8_t>((word >> (63 - i % 64)) & 1u);
    }
    return bits;
}

// ---------------------------------------------------------------- config

/// Noise density for a given Eb/N0 with unit symbol energy, counting CP energy in Eb.
inline double ebn0_to_n0(double ebn0_db, const FrameParams &p)
{
    const double mn = static_cast<double>(p.size());
    const double eb = (mn + static_cast<double>(p.G)) / (mn * static_cast<double>(p.constellation.bits_per_symbol()));
    return eb / std::pow(10.0, ebn0_db / 10.0);
}

struct WaveformSpec
{
    Mode mode = Mode::gocdm;
    std::size_t M = 1;
    std::size_t N = 1;
};

enum class DetectorKind { mp, mmse };

struct DetectorSpec
{
    DetectorKind kind = DetectorKind::mmse;
    MpConfig mp;                             // noise_var is filled per point
    double noise_inflation = 0.0;            // added to N0 to form sigma_o^2
    std::vector<std::size_t> path_truncation; // per-path B, overrides mp.truncation when set

    std::string name() const { return kind == DetectorKind::mp ? "mp" : "mmse"; }
};

struct ExperimentConfig
{
    std::vector<WaveformSpec> waveforms;
    ChannelProfile profile;
    std::vector<DetectorSpec> detectors;
    std::vector<double> ebn0_db;
    std::size_t blocks = 1;
    std::uint64_t seed = 0;
    std::string output;
    std::size_t constellation_order = 4;
    double papr_max_db = 13.0; // upper end of the 0.1 dB CCDF grid

    FrameParams frame(const WaveformSpec &w) const
    {
        return FrameParams(w.mode, w.M, w.N, profile.cp_samples(), profile.sampling_interval(),
                           Constellation::from_order(constellation_order));
    }

    /// Checks run before any trial: grid, counts, and that every delay fits the CP.
    void validate(bool need_channel = true) const
    {
        if (waveforms.empty())
            throw std::invalid_argument("config: no waveforms");
        if (blocks == 0)
            throw std::invalid_argument("config: blocks must be positive");
        for (const auto &w : waveforms)
            (void)frame(w);
        if (!need_channel)
            return;
        profile.validate();
        if (ebn0_db.empty())
            throw std::invalid_argument("config: empty Eb/N0 grid");
        if (detectors.empty())
            throw std::invalid_argument("config: no detectors");
        for (const auto &d : detectors)
            if (d.kind == DetectorKind::mp && d.noise_inflation < 0.0)
                throw std::invalid_argument("config: noise inflation must be non-negative");
        const std::size_t G = profile.cp_samples();
        for (const auto &t : profile.taps)
        {
            const std::size_t l = delay_samples(t.delay, profile.sampling_interval());
            if (l > G)
                throw std::invalid_argument("config: tap delay of " + std::to_string(l) + " samples exceeds CP of " +
                                            std::to_string(G) + " samples in profile " + profile.name);
        }
        for (const auto &d : detectors)
            if (!d.path_truncation.empty() && d.path_truncation.size() != profile.taps.size())
                throw std::invalid_argument("config: path_truncation needs one entry per tap");
    }
};

// ---------------------------------------------------------------- PAPR

struct PaprCurve
{
    std::string waveform;
    std::vector<double> papr0_db;
    std::vector<std::size_t> exceed; // blocks with PAPR > papr0
    std::size_t blocks = 0;

    double prob(std::size_t i) const { return static_cast<double>(exceed[i]) / static_cast<double>(blocks); }
};

/// Empirical CCDF of the block PAPR. All waveforms see the same data bits.
inline std::vector<PaprCurve> run_papr(const ExperimentConfig &cfg)
{
    cfg.validate(false);
    const auto steps = static_cast<std::size_t>(std::floor(cfg.papr_max_db * 10.0 + 1e-9)) + 1;
    std::vector<PaprCurve> curves;
    for (const auto &w : cfg.waveforms)
    {
        const FrameParams p = cfg.frame(w);
        const std::size_t nbits = p.size() * p.constellation.bits_per_symbol();
        std::vector<double> values(cfg.blocks);
        for (std::size_t t = 0; t < cfg.blocks; ++t)
        {
            Rng rng = trial_rng(cfg.seed, 0, t, Stream::bits);
            const auto x = map_bits(random_bits(nbits, rng), p.constellation);
            values[t] = 10.0 * std::log10(papr(modulate(p, x).s));
        }
        std::sort(values.begin(), values.end());

        PaprCurve c;
        c.waveform = p.label();
        c.blocks = cfg.blocks;
        for (std::size_t i = 0; i < steps; ++i)
        {
            const double x = static_cast<double>(i) / 10.0;
            c.papr0_db.push_back(x);
            const auto above = std::upper_bound(values.begin(), values.end(), x);
            c.exceed.push_back(static_cast<std::size_t>(values.end() - above));
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

// ---------------------------------------------------------------- BER

struct TrialRecord
{
    std::uint64_t seed = 0;
    std::size_t waveform = 0;
    std::size_t detector = 0;
    double ebn0_db = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    double papr = 0.0;
    std::size_t iterations = 0;
};

struct BerPoint
{
    std::string waveform;
    std::string detector;
    double ebn0_db = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    std::size_t blocks = 0;
    double mean_iterations = 0.0;

    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
};

inline std::size_t count_bit_errors(const Bits &a, const Bits &b)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        n += a[i] != b[i];
    return n;
}

/**
 * One block through every detector. The channel, bit and noise streams depend
 * on (seed, point, trial) only, so waveforms sharing a block size face the
 * same channel and data at each trial.
 */
inline std::vector<TrialRecord> run_trial(const ExperimentConfig &cfg, std::size_t waveform, std::size_t point,
                                          std::size_t trial)
{
    const FrameParams p = cfg.frame(cfg.waveforms[waveform]);
    const double ebn0 = cfg.ebn0_db[point];
    const double N0 = ebn0_to_n0(ebn0, p);

    Rng chan_rng = trial_rng(cfg.seed, point, trial, Stream::channel);
    Rng bit_rng = trial_rng(cfg.seed, point, trial, Stream::bits);
    Rng noise_rng = trial_rng(cfg.seed, point, trial, Stream::noise);

    const auto ch = draw_channel(cfg.profile, p, chan_rng);
    const Bits bits = random_bits(p.size() * p.constellation.bits_per_symbol(), bit_rng);
    const TxBlock tx = modulate(p, map_bits(bits, p.constellation));
    const cvec r = apply_channel(ch, tx.s, N0, noise_rng, p.G);
    const cvec y = waveform_transform(p, r, Direction::forward);
    const double block_papr = papr(tx.s);

    std::vector<TrialRecord> out;
    cmat dense;
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d)
    {
        const auto &det = cfg.detectors[d];
        TrialRecord rec;
        rec.seed = derive_seed(cfg.seed, {point, trial});
        rec.waveform = waveform;
        rec.detector = d;
        rec.ebn0_db = ebn0;
        rec.bits = bits.size();
        rec.papr = block_papr;

        cvec x_hat;
        if (det.kind == DetectorKind::mmse)
        {
            if (dense.size() == 0)
                dense = dense_heff(p, ch);
            x_hat = mmse_equalize(y, dense, N0, p.constellation);
        }
        else
        {
            MpConfig mp = det.mp;
            mp.noise_var = N0 + det.noise_inflation;
            const auto sg = det.path_truncation.empty() ? sparse_heff(p, ch, mp.truncation)
                                                        : sparse_heff(p, ch, det.path_truncation);
            const auto res = mp_detect(y, sg, p.constellation, mp);
            x_hat = res.x_hat;
            rec.iterations = res.iterations;
        }
        rec.bit_errors = count_bit_errors(bits, demap_symbols(x_hat, p.constellation));
        out.push_back(rec);
    }
    return out;
}

/**
 * BER sweep over waveforms x detectors x Eb/N0. Trials may run on several
 * threads; records land in fixed (point, trial) slots and are summed in that
 * order, so the result does not depend on the thread count.
 */
inline std::vector<BerPoint> run_ber(const ExperimentConfig &cfg, std::size_t threads = 1)
{
    cfg.validate();
    threads = std::max<std::size_t>(1, threads);
    const std::size_t D = cfg.detectors.size();

    std::vector<BerPoint> table;
    for (std::size_t w = 0; w < cfg.waveforms.size(); ++w)
    {
        const std::string label = cfg.frame(cfg.waveforms[w]).label();
        for (std::size_t pt = 0; pt < cfg.ebn0_db.size(); ++pt)
        {
            std::vector<TrialRecord> records(cfg.blocks * D);
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto worker = [&] {
                for (std::size_t t = next++; t < cfg.blocks; t = next++)
                {
                    try
                    {
                        auto recs = run_trial(cfg, w, pt, t);
                        std::copy(recs.begin(), recs.end(), records.begin() + static_cast<std::ptrdiff_t>(t * D));
                    }
                    catch (...)
                    {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = cfg.blocks;
                    }
                }
            };
            if (threads == 1)
                worker();
            else
            {
                std::vector<std::thread> pool;
                for (std::size_t k = 0; k < threads; ++k)
                    pool.emplace_back(worker);
                for (auto &th : pool)
                    th.join();
            }
            if (failure)
                std::rethrow_exception(failure);

            for (std::size_t d = 0; d < D; ++d)
            {
                BerPoint bp;
                bp.waveform = label;
                bp.detector = cfg.detectors[d].name();
                bp.ebn0_db = cfg.ebn0_db[pt];
                bp.blocks = cfg.blocks;
                std::size_t iterations = 0;
                for (std::size_t t = 0; t < cfg.blocks; ++t)
                {
                    const auto &rec = records[t * D + d];
                    bp.bit_errors += rec.bit_errors;
                    bp.bits += rec.bits;
                    iterations += rec.iterations;
                }
                bp.mean_iterations = static_cast<double>(iterations) / static_cast<double>(cfg.blocks);
                table.push_back(bp);
            }
        }
    }
    return table;
}

// ---------------------------------------------------------------- chan-dump

struct ChannelDump
{
    ChannelRealization channel;
    SparseGfChannel sparse;
};

inline ChannelDump chan_dump(const ChannelProfile &profile, const FrameParams &p, std::uint64_t seed, std::size_t B)
{
    Rng rng = trial_rng(seed, 0, 0, Stream::channel);
    auto ch = draw_channel(profile, p, rng);
    auto sg = sparse_heff(p, ch, B);
    return {std::move(ch), std::move(sg)};
}

// ---------------------------------------------------------------- CSV

/// 9 significant digits, %g style.
inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(9) << v;
    return os.str();
}

inline std::string papr_csv(const std::vector<PaprCurve> &curves)
{
    std::ostringstream os;
    os << "waveform,papr0_db,prob\n";
    for (const auto &c : curves)
        for (std::size_t i = 0; i < c.papr0_db.size(); ++i)
            os << c.waveform << ',' << fmt(c.papr0_db[i]) << ',' << fmt(c.prob(i)) << '\n';
    return os.str();
}

inline std::string ber_csv(const std::vector<BerPoint> &table)
{
    std::ostringstream os;
    os << "waveform,detector,ebn0_db,ber,blocks,mean_iterations\n";
    for (const auto &r : table)
        os << r.waveform << ',' << r.detector << ',' << fmt(r.ebn0_db) << ',' << fmt(r.ber()) << ',' << r.blocks
           << ',' << fmt(r.mean_iterations) << '\n';
    return os.str();
}

inline std::string sparse_csv(const SparseGfChannel &sg)
{
    std::ostringstream os;
    os << "row,group,shift,re,im\n";
    for (std::size_t p = 0; p < sg.size(); ++p)
        for (std::size_t l = 0; l < sg.groups(); ++l)
        {
            const cplx c = sg.coeff(p, l);
            os << p << ',' << l << ',' << sg.shift(l) << ',' << fmt(c.real()) << ',' << fmt(c.imag()) << '\n';
        }
    return os.str();
}

inline std::string paths_csv(const ChannelRealization &ch)
{
    std::ostringstream os;
    os << "path,gain_re,gain_im,delay,doppler_int,doppler_frac\n";
    for (std::size_t i = 0; i < ch.paths.size(); ++i)
    {
        const auto &p = ch.paths[i];
        os << i << ',' << fmt(p.gain.real()) << ',' << fmt(p.gain.imag()) << ',' << p.delay << ',' << p.doppler_int
           << ',' << fmt(p.doppler_frac) << '\n';
    }
    return os.str();
}

inline void write_file(const std::string &path, const std::string &content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    if (!f)
        throw std::runtime_error("write failed: " + path);
}

} // namespace gocdm
