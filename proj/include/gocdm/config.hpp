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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gocdm/harness.hpp"

namespace gocdm {

namespace detail {

template <class T>
T get_or(const nlohmann::json &j, const char *key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

} // namespace detail

/**
 * A profile is either a built-in name or an object:
 *   { "name", "carrier", "wave_speed", "speed" (m/s) or "speed_kmh",
 *     "bandwidth", "guard_interval", "block_samples",
 *     "taps": [ { "delay", "power_db" }, ... ] }
 * All quantities in SI units.
 */
inline ChannelProfile profile_from_json(const nlohmann::json &j)
{
    if (j.is_string())
        return builtin_profile(j.get<std::string>());
    ChannelProfile p;
    p.name = detail::get_or<std::string>(j, "name", "custom");
    p.carrier = j.at("carrier").get<double>();
    p.wave_speed = j.at("wave_speed").get<double>();
    if (j.contains("speed_kmh"))
        p.speed = j.at("speed_kmh").get<double>() / 3.6;
    else
        p.speed = j.at("speed").get<double>();
    p.bandwidth = j.at("bandwidth").get<double>();
    p.guard_interval = j.at("guard_interval").get<double>();
    p.block_samples = detail::get_or<std::size_t>(j, "block_samples", 0);
    for (const auto &t : j.at("taps"))
        p.taps.push_back({t.at("delay").get<double>(), t.at("power_db").get<double>()});
    p.validate();
    return p;
}

inline DetectorSpec detector_from_json(const nlohmann::json &j)
{
    DetectorSpec d;
    const auto type = j.at("type").get<std::string>();
    if (type == "mmse")
    {
        d.kind = DetectorKind::mmse;
        return d;
    }
    if (type != "mp")
        throw std::invalid_argument("config: unknown detector type " + type);
    d.kind = DetectorKind::mp;
    d.mp.damping = detail::get_or(j, "damping", d.mp.damping);
    d.mp.max_iterations = detail::get_or(j, "max_iterations", d.mp.max_iterations);
    d.mp.gamma = detail::get_or(j, "gamma", d.mp.gamma);
    d.mp.epsilon = detail::get_or(j, "epsilon", d.mp.epsilon);
    d.mp.truncation = detail::get_or(j, "truncation", d.mp.truncation);
    d.noise_inflation = detail::get_or(j, "noise_inflation", 0.0);
    if (j.contains("path_truncation"))
        d.path_truncation = j.at("path_truncation").get<std::vector<std::size_t>>();
    return d;
}

inline ExperimentConfig config_from_json(const nlohmann::json &j)
{
    ExperimentConfig cfg;
    for (const auto &w : j.at("waveforms"))
    {
        WaveformSpec spec;
        spec.mode = mode_from_string(w.at("mode").get<std::string>());
        spec.M = detail::get_or<std::size_t>(w, "M", 1);
        spec.N = detail::get_or<std::size_t>(w, "N", 1);
        cfg.waveforms.push_back(spec);
    }
    if (j.contains("profile"))
        cfg.profile = profile_from_json(j.at("profile"));
    else
        cfg.profile = uwa_table2();
    if (j.contains("detectors"))
        for (const auto &d : j.at("detectors"))
            cfg.detectors.push_back(detector_from_json(d));
    if (j.contains("ebn0_db"))
        cfg.ebn0_db = j.at("ebn0_db").get<std::vector<double>>();
    cfg.blocks = j.at("blocks").get<std::size_t>();
    cfg.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
    cfg.output = detail::get_or<std::string>(j, "output", "");
    cfg.constellation_order = detail::get_or<std::size_t>(j, "constellation_order", 4);
    cfg.papr_max_db = detail::get_or(j, "papr_max_db", cfg.papr_max_db);
    return cfg;
}

inline ExperimentConfig load_config(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open config " + path);
    try
    {
        return config_from_json(nlohmann::json::parse(f));
    }
    catch (const nlohmann::json::exception &e)
    {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
}

} // namespace gocdm
