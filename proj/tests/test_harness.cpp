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

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace gocdm;
using namespace gocdm::test;

namespace {

std::string slurp(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

ExperimentConfig small_config(const ChannelProfile &profile, std::size_t MN)
{
    ExperimentConfig cfg;
    cfg.profile = profile;
    cfg.waveforms = {{Mode::gocdm, 8, MN / 8}, {Mode::ocdm, 1, MN}, {Mode::ofdm, 1, MN}};
    DetectorSpec mmse;
    DetectorSpec mp;
    mp.kind = DetectorKind::mp;
    // the truncation residual is far from negligible on the overspread profile
    const bool overspread = spreads(profile).product() > 1.0;
    mp.mp.truncation = overspread ? 10 : 5;
    mp.noise_inflation = overspread ? 1e-3 : 0.0;
    cfg.detectors = {mmse, mp};
    cfg.blocks = 10;
    cfg.seed = 42;
    return cfg;
}

std::filesystem::path scratch_dir()
{
    auto dir = std::filesystem::temp_directory_path() / "gocdm_test_harness";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("Eb/N0 accounting", "[harness]")
{
    const FrameParams no_cp{Mode::gocdm, 4, 4, 0, 1.0};
    CHECK(ebn0_to_n0(0.0, no_cp) == Catch::Approx(0.5));
    const FrameParams full_cp{Mode::gocdm, 4, 4, 16, 1.0};
    CHECK(ebn0_to_n0(0.0, full_cp) / ebn0_to_n0(0.0, no_cp) == Catch::Approx(2.0));
    const FrameParams uwa{Mode::gocdm, 8, 16, 48, 1.0 / 3200.0};
    CHECK(ebn0_to_n0(7.0, uwa) / ebn0_to_n0(7.0, FrameParams{Mode::gocdm, 8, 16, 0, 1.0 / 3200.0}) ==
          Catch::Approx(1.375));
    CHECK(ebn0_to_n0(10.0, no_cp) == Catch::Approx(0.05));
}

TEST_CASE("seed derivation is pure and spreads", "[harness]")
{
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(2, {2, 3}));
    auto a = trial_rng(9, 0, 0, Stream::channel);
    auto b = trial_rng(9, 0, 0, Stream::noise);
    CHECK(a() != b());
    Rng r(1);
    const Bits bits = random_bits(1000, r);
    const auto ones = std::count(bits.begin(), bits.end(), 1);
    CHECK(ones > 400);
    CHECK(ones < 600);
}

TEST_CASE("high SNR leaves no bit errors", "[harness]")
{
    for (const auto &[profile, MN] : {std::pair{uwa_table2(), std::size_t{128}}, std::pair{eva_table4(), std::size_t{256}}})
    {
        auto cfg = small_config(profile, MN);
        cfg.ebn0_db = {60.0};
        cfg.blocks = 100;
        if (MN == 256)
            cfg.blocks = 40;
        for (const auto &row : run_ber(cfg))
        {
            INFO(profile.name << ' ' << row.waveform << ' ' << row.detector);
            CHECK(row.bit_errors == 0);
            CHECK(row.bits == cfg.blocks * MN * 2);
        }
    }
}

TEST_CASE("BER sweep is deterministic and thread independent", "[harness]")
{
    auto cfg = small_config(uwa_table2(), 128);
    cfg.ebn0_db = {6.0, 12.0};
    const std::string one = ber_csv(run_ber(cfg, 1));
    CHECK(one == ber_csv(run_ber(cfg, 1)));
    CHECK(one == ber_csv(run_ber(cfg, 3)));
    cfg.seed = 43;
    CHECK(one != ber_csv(run_ber(cfg, 1)));

    const auto rows = run_ber(cfg);
    REQUIRE(rows.size() == 3 * 2 * 2);
    CHECK(rows[0].waveform == "gocdm_m8_n16");
    CHECK(rows[0].detector == "mmse");
    CHECK(rows[1].detector == "mp");
    CHECK(rows[1].mean_iterations >= 1.0);
    for (const auto &r : rows)
        CHECK(r.bit_errors <= r.bits);
}

TEST_CASE("configuration errors surface before trials", "[harness]")
{
    auto cfg = small_config(uwa_table2(), 128);
    cfg.ebn0_db = {10.0};
    auto short_guard = cfg;
    short_guard.profile.guard_interval = 5e-3;
    CHECK_THROWS_AS(run_ber(short_guard), std::invalid_argument);
    auto empty = cfg;
    empty.ebn0_db.clear();
    CHECK_THROWS_AS(run_ber(empty), std::invalid_argument);
    auto zero = cfg;
    zero.blocks = 0;
    CHECK_THROWS_AS(run_ber(zero), std::invalid_argument);
}

TEST_CASE("PAPR CCDF", "[harness]")
{
    ExperimentConfig cfg;
    cfg.profile = uwa_table2();
    cfg.waveforms = {{Mode::sc, 128, 1}, {Mode::gocdm, 8, 16}, {Mode::ofdm, 1, 128}};
    cfg.blocks = 2000;
    cfg.seed = 5;
    const auto curves = run_papr(cfg);
    REQUIRE(curves.size() == 3);
    for (std::size_t i = 1; i < curves[0].papr0_db.size(); ++i)
        CHECK(curves[0].exceed[i] == 0);
    for (const auto &c : curves)
    {
        CHECK(c.papr0_db.front() == 0.0);
        CHECK(c.papr0_db.back() == Catch::Approx(13.0));
        for (std::size_t i = 1; i < c.exceed.size(); ++i)
            CHECK(c.exceed[i] <= c.exceed[i - 1]);
    }
    CHECK(curves[2].exceed[60] > 0);
    const std::string csv = papr_csv(curves);
    CHECK(csv.rfind("waveform,papr0_db,prob\n", 0) == 0);
    CHECK(csv.find("sc_m128,0.1,0\n") != std::string::npos);
}

TEST_CASE("channel dump", "[harness]")
{
    const auto eva = eva_table4();
    const FrameParams p(Mode::gocdm, 8, 32, eva.cp_samples(), eva.sampling_interval());
    for (std::uint64_t s = 0; s < 20; ++s)
        CHECK(chan_dump(eva, p, s, 5).channel.max_delay() <= 39);

    auto still = uwa_table2();
    still.speed = 0.0;
    const FrameParams q(Mode::gocdm, 8, 16, still.cp_samples(), still.sampling_interval());
    const auto d = chan_dump(still, q, 3, 10);
    for (const auto &path : d.channel.paths)
    {
        CHECK(path.doppler_int == 0);
        CHECK(path.doppler_frac == 0.0);
    }
    const std::string csv = sparse_csv(d.sparse);
    CHECK(csv.rfind("row,group,shift,re,im\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == 1 + 128 * d.sparse.groups());
    CHECK(sparse_csv(chan_dump(uwa_table2(), q, 3, 10).sparse) == sparse_csv(chan_dump(uwa_table2(), q, 3, 10).sparse));
}

TEST_CASE("number formatting", "[harness]")
{
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(1.0 / 3.0) == "0.333333333");
    CHECK(fmt(2.5e-7) == "2.5e-07");
    CHECK(fmt(12.0) == "12");
}

TEST_CASE("JSON configuration", "[harness]")
{
    const auto j = nlohmann::json::parse(R"({
        "profile": {"name": "flat", "carrier": 1e9, "wave_speed": 3e8, "speed_kmh": 36,
                    "bandwidth": 1e6, "guard_interval": 4e-6,
                    "taps": [{"delay": 0, "power_db": 0}, {"delay": 2e-6, "power_db": -3}]},
        "waveforms": [{"mode": "gocdm", "M": 4, "N": 8}, {"mode": "sc", "M": 32}],
        "detectors": [{"type": "mmse"}, {"type": "mp", "damping": 0.5, "truncation": 3,
                       "noise_inflation": 0.01, "path_truncation": [1, 2]}],
        "ebn0_db": [0, 5], "blocks": 3, "seed": 11, "output": "x.csv"})");
    const auto cfg = config_from_json(j);
    CHECK(cfg.profile.speed == Catch::Approx(10.0));
    CHECK(cfg.profile.cp_samples() == 4);
    CHECK(cfg.waveforms[1].mode == Mode::sc);
    CHECK(cfg.waveforms[1].N == 1);
    CHECK(cfg.detectors[1].kind == DetectorKind::mp);
    CHECK(cfg.detectors[1].mp.damping == 0.5);
    CHECK(cfg.detectors[1].noise_inflation == 0.01);
    CHECK(cfg.detectors[1].path_truncation == std::vector<std::size_t>{1, 2});
    CHECK(cfg.seed == 11);
    CHECK_NOTHROW(run_ber(cfg));

    CHECK(config_from_json(nlohmann::json::parse(R"({"profile": "eva_table4", "waveforms": [{"mode": "ocdm", "N": 256}], "blocks": 1})"))
              .profile.name == "eva_table4");
    CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"waveforms": [{"mode": "qpsk"}], "blocks": 1})")));
    CHECK_THROWS(detector_from_json(nlohmann::json::parse(R"({"type": "zf"})")));
}

TEST_CASE("shipped configs load", "[harness]")
{
    for (const char *name : {"uwa_ber.json", "eva_ber.json", "papr.json"})
    {
        INFO(name);
        const auto cfg = load_config(std::string(GOCDM_CONFIG_DIR) + "/" + name);
        CHECK_NOTHROW(cfg.validate(cfg.detectors.size() > 0));
    }
}

TEST_CASE("command line runs are reproducible", "[harness]")
{
    const auto dir = scratch_dir();
    const auto cfg_path = (dir / "cli.json").string();
    {
        std::ofstream f(cfg_path);
        f << R"({"profile": "uwa_table2", "waveforms": [{"mode": "gocdm", "M": 8, "N": 16}, {"mode": "ofdm", "N": 128}],
                 "detectors": [{"type": "mmse"}, {"type": "mp"}], "ebn0_db": [8], "blocks": 5, "seed": 1})";
    }
    const std::string exe = GOCDM_SIM_EXE;
    const auto a = (dir / "a.csv").string();
    const auto b = (dir / "b.csv").string();
    REQUIRE(std::system((exe + " ber --config " + cfg_path + " --out " + a + " --seed 77").c_str()) == 0);
    REQUIRE(std::system((exe + " ber --config " + cfg_path + " --out " + b + " --seed 77").c_str()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("waveform,detector,ebn0_db,ber,blocks,mean_iterations\n", 0) == 0);

    const auto c1 = (dir / "chan.csv").string();
    REQUIRE(std::system((exe + " chan-dump --profile uwa_table2 --seed 4 --out " + c1).c_str()) == 0);
    const std::string first = slurp(c1);
    const std::string first_paths = slurp((dir / "chan_paths.csv").string());
    REQUIRE(std::system((exe + " chan-dump --profile uwa_table2 --seed 4 --out " + c1).c_str()) == 0);
    CHECK(slurp(c1) == first);
    CHECK(first_paths.rfind("path,gain_re,gain_im,delay,doppler_int,doppler_frac\n", 0) == 0);

    CHECK(std::system((exe + " chan-dump --profile nowhere --seed 4 --out " + c1 + " 2>/dev/null").c_str()) != 0);
}
