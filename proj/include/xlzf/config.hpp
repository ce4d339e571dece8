// SPDX-License-Identifier: Apache-2.0
//
// xlzf: low-complexity zero-forcing precoding for XL-MIMO downlinks
// Copyright (C) 2026 The xlzf Authors
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
#include <charconv>
#include <cstdint>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xlzf/harness.hpp"

namespace xlzf
{

// Flat "key = value" scenario files. Keys are the ScenarioParams field names; angle fields take
// radians, or degrees when written with a "_deg" suffix (s_az_deg, sigma_g_deg, ...). '#' starts
// a comment. schemes is a comma-separated list of ZF, ZF-ortho, MZF, TZF-ortho.

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_value(std::string_view field, std::string_view text)
{
    T value{};
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != last)
        throw ConfigError(std::string(field), "cannot parse '" + std::string(text) + "'");
    return value;
}

} // namespace detail

inline std::vector<BenchScheme> parse_scheme_list(std::string_view field, std::string_view text)
{
    std::vector<BenchScheme> out;
    while (!text.empty())
    {
        const auto comma = text.find(',');
        const auto item = detail::trim(text.substr(0, comma));
        const auto s = parse_scheme(item);
        if (!s)
            throw ConfigError(std::string(field), "unknown scheme '" + std::string(item) + "'");
        if (std::find(out.begin(), out.end(), *s) == out.end())
            out.push_back(*s);
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty())
        throw ConfigError(std::string(field), "empty scheme list");
    return out;
}

/// Applies one key/value pair to `p`. Throws ConfigError naming the key on failure.
inline void apply_config_entry(ScenarioParams &p, std::string_view key, std::string_view value)
{
    using detail::parse_value;
    const std::string k(key);
    auto angle = [&](std::string_view base, double &target) {
        if (key == base)
        {
            target = parse_value<double>(key, value);
            return true;
        }
        if (key.size() == base.size() + 4 && key.substr(0, base.size()) == base && key.substr(base.size()) == "_deg")
        {
            target = parse_value<double>(key, value) * kDegree;
            return true;
        }
        return false;
    };

    if (k == "m_h")
        p.m_h = parse_value<int>(key, value);
    else if (k == "m_v")
        p.m_v = parse_value<int>(key, value);
    else if (k == "u")
        p.u = parse_value<int>(key, value);
    else if (k == "carrier_hz")
        p.carrier_hz = parse_value<double>(key, value);
    else if (k == "noise_var")
        p.noise_var = parse_value<double>(key, value);
    else if (k == "d")
        p.d = parse_value<double>(key, value);
    else if (k == "n_c")
        p.n_c = parse_value<int>(key, value);
    else if (k == "trials")
        p.trials = parse_value<int>(key, value);
    else if (k == "master_seed")
        p.master_seed = parse_value<std::uint64_t>(key, value);
    else if (k == "total_power")
        p.total_power = parse_value<double>(key, value);
    else if (k == "schemes")
        p.schemes = parse_scheme_list(key, value);
    else if (angle("s_az", p.s_az) || angle("s_el", p.s_el) || angle("sigma_g", p.sigma_g) ||
             angle("theta_t0", p.theta_t0))
        ;
    else
        throw ConfigError(k, "unknown field");
}

/// Reads a whole config file on top of `base` and validates the result.
inline ScenarioParams parse_config(std::istream &is, ScenarioParams base)
{
    std::string line;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty())
            continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const auto key = detail::trim(view.substr(0, eq));
        const auto value = detail::trim(view.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno), "missing key");
        if (!seen.insert(std::string(key)).second)
            throw ConfigError(std::string(key), "given more than once");
        apply_config_entry(base, key, value);
    }
    base.validate();
    return base;
}

} // namespace xlzf
