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

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gocdm/config.hpp"

namespace {

gocdm::ExperimentConfig load(const std::string &path, const std::string &out, std::optional<std::uint64_t> seed)
{
    auto cfg = gocdm::load_config(path);
    if (!out.empty())
        cfg.output = out;
    if (cfg.output.empty())
        throw std::invalid_argument("no output path: pass --out or set \"output\" in the config");
    if (seed)
        cfg.seed = *seed;
    return cfg;
}

std::string paths_file(const std::string &out)
{
    std::filesystem::path p(out);
    const auto stem = p.stem().string() + "_paths" + p.extension().string();
    return (p.parent_path() / stem).string();
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"gocdm-sim: GOCDM / OCDM / OFDM link simulations"};
    app.require_subcommand(1);

    std::string config_path, out;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;

    auto *papr = app.add_subcommand("papr", "PAPR CCDF of every configured waveform");
    papr->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    papr->add_option("--out", out, "output CSV");
    papr->add_option("--seed", seed, "master seed (overrides the config)");

    auto *ber = app.add_subcommand("ber", "BER versus Eb/N0 sweep");
    ber->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    ber->add_option("--out", out, "output CSV");
    ber->add_option("--seed", seed, "master seed (overrides the config)");
    ber->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    std::string profile_name, mode = "gocdm";
    std::uint64_t dump_seed = 0;
    std::size_t M = 8, N = 0, B = 10;
    CLI::Option *m_opt = nullptr;
    auto *dump = app.add_subcommand("chan-dump", "draw one channel and write its sparse GF-domain matrix");
    dump->add_option("--profile", profile_name, "built-in profile (uwa_table2, eva_table4)")->required();
    dump->add_option("--seed", dump_seed, "seed")->required();
    dump->add_option("--out", out, "output CSV; the path table goes to <stem>_paths.csv")->required();
    dump->add_option("--mode", mode, "gocdm, ocdm, ofdm or sc");
    m_opt = dump->add_option("-M", M, "chirp groups per block (default 8; 1 for ocdm/ofdm, block length for sc)");
    dump->add_option("-N", N, "chirps per group (default: block length of the profile / M)");
    dump->add_option("-B", B, "fractional Doppler truncation");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (papr->parsed())
        {
            const auto cfg = load(config_path, out, seed);
            gocdm::write_file(cfg.output, gocdm::papr_csv(gocdm::run_papr(cfg)));
        }
        else if (ber->parsed())
        {
            const auto cfg = load(config_path, out, seed);
            gocdm::write_file(cfg.output, gocdm::ber_csv(gocdm::run_ber(cfg, threads)));
        }
        else
        {
            const auto profile = gocdm::builtin_profile(profile_name);
            const auto m = gocdm::mode_from_string(mode);
            if (m == gocdm::Mode::ocdm || m == gocdm::Mode::ofdm)
                M = 1;
            if (m == gocdm::Mode::sc)
            {
                N = 1;
                if (m_opt->count() == 0)
                    M = profile.block_samples;
            }
            if (N == 0)
            {
                if (profile.block_samples == 0 || profile.block_samples % M != 0)
                    throw std::invalid_argument("chan-dump: pass -N for this profile");
                else
                    N = profile.block_samples / M;
            }
            const gocdm::FrameParams p(m, M, N, profile.cp_samples(), profile.sampling_interval());
            const auto d = gocdm::chan_dump(profile, p, dump_seed, B);
            gocdm::write_file(out, gocdm::sparse_csv(d.sparse));
            gocdm::write_file(paths_file(out), gocdm::paths_csv(d.channel));
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "gocdm-sim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
