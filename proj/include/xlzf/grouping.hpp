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
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xlzf/channel.hpp"
#include "xlzf/errors.hpp"
#include "xlzf/geometry.hpp"

namespace xlzf
{

using UserGroups = std::vector<std::vector<int>>;

struct GreedyGroupingResult
{
    UserGroups groups;             // each group sorted by user index
    double final_threshold = 0.0;  // theta_t used by the accepted pass
    int passes = 0;                // outer iterations executed
};

/// Upper bound on outer passes of greedy_grouping: ceil(log2(pi / theta_t0)) + 1.
inline int grouping_pass_bound(double theta_t0)
{
    if (theta_t0 >= std::numbers::pi)
        return 1;
    return static_cast<int>(std::ceil(std::log2(std::numbers::pi / theta_t0))) + 1;
}

namespace detail
{

// One inner grouping loop at a fixed threshold.
inline UserGroups group_once(std::span<const double> theta, double threshold, int m_h)
{
    std::vector<int> pool(theta.size());
    std::iota(pool.begin(), pool.end(), 0);
    UserGroups groups;

    while (!pool.empty())
    {
        std::sort(pool.begin(), pool.end(), [&](int a, int b) {
            return theta[a] != theta[b] ? theta[a] < theta[b] : a < b;
        });
        const std::size_t n = pool.size();

        // seed: smallest gap to its nearest sorted neighbour, lowest position on ties
        std::size_t seed = 0;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k)
        {
            double gap = std::numeric_limits<double>::infinity();
            if (k > 0)
                gap = std::min(gap, theta[pool[k]] - theta[pool[k - 1]]);
            if (k + 1 < n)
                gap = std::min(gap, theta[pool[k + 1]] - theta[pool[k]]);
            if (gap < best_gap)
            {
                best_gap = gap;
                seed = k;
            }
        }

        const double centre = theta[pool[seed]];
        std::vector<std::size_t> near;
        for (std::size_t k = 0; k < n; ++k)
            if (k != seed && std::abs(theta[pool[k]] - centre) < threshold)
                near.push_back(k);
        std::stable_sort(near.begin(), near.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(theta[pool[a]] - centre) < std::abs(theta[pool[b]] - centre);
        });
        const auto take = std::min(near.size(), static_cast<std::size_t>(std::max(m_h - 1, 0)));
        near.resize(take);
        near.push_back(seed);

        std::vector<int> group;
        for (std::size_t k : near)
            group.push_back(pool[k]);
        std::sort(group.begin(), group.end());

        std::sort(near.begin(), near.end(), std::greater<>());
        for (std::size_t k : near)
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        groups.push_back(std::move(group));
    }
    return groups;
}

} // namespace detail

/// Elevation-angle greedy user grouping.
///
/// Each pass sorts the ungrouped users by elevation, seeds a group at the user with the smallest
/// gap to a sorted neighbour and adds up to M_H - 1 nearest users within theta_t of the seed.
/// Passes double theta_t until N_g^2 < M_V. If a pass at theta_t >= pi still fails the groups are
/// limited by M_H alone and no further doubling can help, so InfeasibleGrouping is thrown.
inline GreedyGroupingResult greedy_grouping(std::span<const double> theta, double theta_t0, int m_h, int m_v)
{
    if (theta.empty())
        throw InvalidArgument("greedy_grouping: no users");
    if (!(theta_t0 > 0.0) || !std::isfinite(theta_t0))
        throw InvalidArgument("greedy_grouping: initial threshold must be positive");
    if (m_h < 1 || m_v < 1)
        throw InvalidArgument("greedy_grouping: array dimensions must be positive");
    for (double t : theta)
        if (!std::isfinite(t))
            throw InvalidArgument("greedy_grouping: non-finite elevation angle");

    GreedyGroupingResult out;
    double threshold = theta_t0;
    for (;;)
    {
        ++out.passes;
        UserGroups groups = detail::group_once(theta, threshold, m_h);
        const auto n_g = static_cast<long long>(groups.size());
        if (n_g * n_g < m_v)
        {
            out.groups = std::move(groups);
            out.final_threshold = threshold;
            return out;
        }
        if (threshold >= std::numbers::pi)
            throw InfeasibleGrouping("greedy_grouping: " + std::to_string(n_g) + " groups needed for " +
                                     std::to_string(theta.size()) + " users with M_H=" + std::to_string(m_h) +
                                     ", but N_g^2 < M_V=" + std::to_string(m_v) + " cannot be met");
        threshold *= 2.0;
    }
}

/// Sub-array row counts maximising min_i M_V,i / G_i subject to M_V,i >= N_g and sum <= M_V.
/// Water-filling: start every group at N_g rows, then hand out the remaining rows one at a time to
/// the group with the smallest ratio (lowest index on ties). Ratios are compared exactly in integers.
inline std::vector<int> partition_rows(std::span<const int> group_sizes, int m_v)
{
    const auto n_g = static_cast<int>(group_sizes.size());
    if (n_g < 1)
        throw InvalidArgument("partition_rows: need at least one group");
    for (int g : group_sizes)
        if (g < 1)
            throw InvalidArgument("partition_rows: group sizes must be positive");
    if (static_cast<long long>(n_g) * n_g > m_v)
        throw InfeasiblePartition("partition_rows: N_g^2 = " + std::to_string(n_g * n_g) + " exceeds M_V = " +
                                  std::to_string(m_v));

    std::vector<int> rows(static_cast<std::size_t>(n_g), n_g);
    for (int left = m_v - n_g * n_g; left > 0; --left)
    {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
        {
            // rows[i] / G_i < rows[pick] / G_pick
            if (static_cast<long long>(rows[i]) * group_sizes[pick] <
                static_cast<long long>(rows[pick]) * group_sizes[i])
                pick = i;
        }
        ++rows[pick];
    }
    return rows;
}

/// A run of consecutive URA rows, zero-based.
struct RowBlock
{
    int first = 0;
    int count = 0;

    std::vector<int> rows() const
    {
        std::vector<int> r(static_cast<std::size_t>(count));
        std::iota(r.begin(), r.end(), first);
        return r;
    }
};

/// Lays the blocks out bottom to top in `group_order`; rows left over after all blocks go to the
/// block placed last. Result is indexed by group.
inline std::vector<RowBlock> assign_row_blocks(std::span<const int> row_counts, std::span<const int> group_order,
                                               int m_v)
{
    const std::size_t n = row_counts.size();
    if (group_order.size() != n)
        throw InvalidArgument("assign_row_blocks: order length differs from number of groups");
    std::vector<bool> seen(n, false);
    for (int g : group_order)
    {
        if (g < 0 || static_cast<std::size_t>(g) >= n || seen[static_cast<std::size_t>(g)])
            throw InvalidArgument("assign_row_blocks: group order is not a permutation");
        seen[static_cast<std::size_t>(g)] = true;
    }
    long long total = 0;
    for (int c : row_counts)
    {
        if (c < 1)
            throw InvalidArgument("assign_row_blocks: row counts must be positive");
        total += c;
    }
    if (total > m_v)
        throw InvalidArgument("assign_row_blocks: row counts exceed M_V");

    std::vector<RowBlock> blocks(n);
    int next = 0;
    for (int g : group_order)
    {
        blocks[static_cast<std::size_t>(g)] = {next, row_counts[static_cast<std::size_t>(g)]};
        next += row_counts[static_cast<std::size_t>(g)];
    }
    if (n > 0)
        blocks[static_cast<std::size_t>(group_order.back())].count += m_v - next;
    return blocks;
}

/// Entry (i, j): mean over users of group j of their mean elevation across sub-array i.
inline Eigen::MatrixXd group_mean_elevations(const PropagationAngles &angles, const UserGroups &groups,
                                             std::span<const RowBlock> blocks)
{
    if (blocks.size() != groups.size())
        throw InvalidArgument("group_mean_elevations: one row block per group required");
    const auto n_g = static_cast<Eigen::Index>(groups.size());
    Eigen::MatrixXd out(n_g, n_g);
    for (Eigen::Index i = 0; i < n_g; ++i)
    {
        const auto rows = blocks[static_cast<std::size_t>(i)].rows();
        for (Eigen::Index j = 0; j < n_g; ++j)
        {
            const auto &members = groups[static_cast<std::size_t>(j)];
            double acc = 0.0;
            for (int u : members)
                acc += mean_elevation(angles, static_cast<std::size_t>(u), rows);
            out(i, j) = acc / static_cast<double>(members.size());
        }
    }
    return out;
}

struct Grouping
{
    UserGroups members;
    std::vector<int> sizes;
    std::vector<int> row_counts;
    std::vector<RowBlock> row_blocks;
    Eigen::MatrixXd mean_elevation; // (sub-array i, group j)
    double final_threshold = 0.0;
    int passes = 0;

    int n_groups() const { return static_cast<int>(members.size()); }

    int group_of(int user) const
    {
        for (std::size_t g = 0; g < members.size(); ++g)
            if (std::find(members[g].begin(), members[g].end(), user) != members[g].end())
                return static_cast<int>(g);
        return -1;
    }
};

/// Full MZF grouping pipeline: greedy grouping on centroid elevations, row partitioning, block
/// placement in ascending order of group mean centroid elevation, and mean-angle table.
inline Grouping build_grouping(const PropagationAngles &angles, std::span<const double> centroid_elevation,
                               double theta_t0)
{
    if (centroid_elevation.size() != angles.users())
        throw InvalidArgument("build_grouping: elevation count differs from user count");

    Grouping g;
    auto greedy = greedy_grouping(centroid_elevation, theta_t0, angles.m_h, angles.m_v);
    g.members = std::move(greedy.groups);
    g.final_threshold = greedy.final_threshold;
    g.passes = greedy.passes;
    for (const auto &m : g.members)
        g.sizes.push_back(static_cast<int>(m.size()));
    g.row_counts = partition_rows(g.sizes, angles.m_v);

    std::vector<double> centre(g.members.size(), 0.0);
    for (std::size_t i = 0; i < g.members.size(); ++i)
    {
        for (int u : g.members[i])
            centre[i] += centroid_elevation[static_cast<std::size_t>(u)];
        centre[i] /= static_cast<double>(g.members[i].size());
    }
    std::vector<int> order(g.members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return centre[a] < centre[b]; });

    g.row_blocks = assign_row_blocks(g.row_counts, order, angles.m_v);
    g.mean_elevation = group_mean_elevations(angles, g.members, g.row_blocks);
    return g;
}

/// Human-readable dump of a grouping; angles in degrees, rows zero-based.
inline std::string grouping_report(const Grouping &g)
{
    constexpr double deg = 180.0 / std::numbers::pi;
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "groups " << g.n_groups() << "  threshold_deg " << g.final_threshold * deg << "  passes " << g.passes
       << '\n';
    for (int i = 0; i < g.n_groups(); ++i)
    {
        const auto &b = g.row_blocks[static_cast<std::size_t>(i)];
        os << "  group " << i << ": users {";
        for (std::size_t k = 0; k < g.members[static_cast<std::size_t>(i)].size(); ++k)
            os << (k ? "," : "") << g.members[static_cast<std::size_t>(i)][k];
        os << "} rows [" << b.first << ".." << b.first + b.count - 1 << "] mean_elev_deg [";
        for (int j = 0; j < g.n_groups(); ++j)
            os << (j ? " " : "") << g.mean_elevation(i, j) * deg;
        os << "]\n";
    }
    return os.str();
}

} // namespace xlzf
