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
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xlzf/errors.hpp"
#include "xlzf/grouping.hpp"
#include "xlzf/numerics.hpp"
#include "xlzf/precoders.hpp"

namespace xlzf
{

struct SinrTerms
{
    double signal = 0.0; // |h_u^H f_u|^2
    double intra = 0.0;  // same attribution group, same slot
    double inter = 0.0;  // other attribution groups, same slot
};

/// Signal and interference powers per user. Only users sharing u's slot interfere; `groups`
/// decides whether an interferer counts as intra- or inter-group (empty: everything is intra).
inline std::vector<SinrTerms> sinr_terms(const cmat &channels, const PrecodeResult &precode, const UserGroups &groups)
{
    const auto users = static_cast<std::size_t>(channels.cols());
    if (precode.vectors.cols() != channels.cols() || precode.vectors.rows() != channels.rows())
        throw InvalidArgument("sinr: precoder and channel dimensions differ");

    std::vector<int> group_of(users, 0);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int u : groups[g])
            group_of.at(static_cast<std::size_t>(u)) = static_cast<int>(g);

    std::vector<SinrTerms> out(users);
    for (const auto &slot : precode.slots)
        for (int u : slot)
        {
            const auto h = channels.col(u);
            auto &t = out[static_cast<std::size_t>(u)];
            t.signal = std::norm(h.dot(precode.vectors.col(u)));
            for (int p : slot)
            {
                if (p == u)
                    continue;
                const double leak = std::norm(h.dot(precode.vectors.col(p)));
                if (group_of[static_cast<std::size_t>(p)] == group_of[static_cast<std::size_t>(u)])
                    t.intra += leak;
                else
                    t.inter += leak;
            }
        }
    return out;
}

/// Linear SINR per user: signal / (intra + inter + sigma_n^2).
inline std::vector<double> sinr(const cmat &channels, const PrecodeResult &precode, const UserGroups &groups,
                                double noise_var)
{
    if (!(noise_var > 0.0))
        throw InvalidArgument("sinr: noise variance must be positive");
    const auto terms = sinr_terms(channels, precode, groups);
    std::vector<double> out;
    out.reserve(terms.size());
    for (const auto &t : terms)
        out.push_back(t.signal / (t.intra + t.inter + noise_var));
    return out;
}

/// Sum of log2(1 + SINR_u), bits/s/Hz.
inline double sum_rate(std::span<const double> sinrs)
{
    double acc = 0.0;
    for (double s : sinrs)
    {
        if (!(s >= 0.0))
            throw InvalidArgument("sum_rate: SINR must be non-negative");
        acc += std::log2(1.0 + s);
    }
    return acc;
}

// Time-sharing loss of orthogonal scheduling.
inline double normalize_rate(double rate, int n_slots)
{
    if (n_slots < 1)
        throw InvalidArgument("normalize_rate: slot count must be at least 1");
    return rate / n_slots;
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

/// Median with the midpoint convention for even sample counts.
inline double median(std::vector<double> samples)
{
    if (samples.empty())
        throw InvalidArgument("median: empty sample set");
    const std::size_t n = samples.size();
    const auto mid = samples.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(samples.begin(), mid, samples.end());
    const double upper = *mid;
    if (n % 2 == 1)
        return upper;
    const double lower = *std::max_element(samples.begin(), mid);
    return lower + (upper - lower) / 2.0;
}

/// Empirical CDF as (value, k/N) pairs at the sorted samples.
inline std::vector<std::pair<double, double>> ecdf(std::vector<double> samples)
{
    if (samples.empty())
        throw InvalidArgument("ecdf: empty sample set");
    std::sort(samples.begin(), samples.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(samples.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k)
        out.emplace_back(samples[k], static_cast<double>(k + 1) / n);
    return out;
}

struct MetricsRecord
{
    std::vector<double> per_user_sinr; // linear
    double sum_rate = 0.0;
    double normalized_sum_rate = 0.0;
    std::string scheme;
    std::uint64_t trial_seed = 0;
    int n_slots = 1;
    std::vector<int> degenerate;
};

/// SINR, sum-rate and time-sharing normalisation for one precoded drop.
inline MetricsRecord measure(const cmat &channels, const PrecodeResult &precode, const UserGroups &attribution,
                             double noise_var, std::string scheme, std::uint64_t seed)
{
    MetricsRecord r;
    r.per_user_sinr = sinr(channels, precode, attribution, noise_var);
    r.sum_rate = sum_rate(r.per_user_sinr);
    r.n_slots = static_cast<int>(precode.slots.size());
    r.normalized_sum_rate =
        precode.schedule == Schedule::orthogonal ? normalize_rate(r.sum_rate, r.n_slots) : r.sum_rate;
    r.scheme = std::move(scheme);
    r.trial_seed = seed;
    r.degenerate = precode.degenerate;
    return r;
}

} // namespace xlzf
