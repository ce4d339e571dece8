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

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "xlzf/channel.hpp"
#include "xlzf/errors.hpp"
#include "xlzf/grouping.hpp"
#include "xlzf/numerics.hpp"

namespace xlzf
{

enum class Scheme
{
    zf,
    mzf,
    tzf,
    mrt
};

enum class Schedule
{
    simultaneous,
    orthogonal
};

/// What a precoder does when a user's projected vector is numerically zero.
enum class OnDegenerate
{
    raise, // throw DegenerateUser
    zero   // leave f_u = 0 and list u in PrecodeResult::degenerate
};

inline std::string_view to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::zf:
        return "ZF";
    case Scheme::mzf:
        return "MZF";
    case Scheme::tzf:
        return "TZF";
    case Scheme::mrt:
        return "MRT";
    }
    return "?";
}

/// Total power P_Tx split equally over the users active in a slot.
struct PowerPolicy
{
    double total_power = 1.0;

    double per_user(std::size_t active) const
    {
        if (active == 0)
            throw InvalidArgument("PowerPolicy: empty slot");
        return total_power / static_cast<double>(active);
    }
};

struct PrecodeResult
{
    cmat vectors; // M x U, column u is f_u
    Scheme scheme = Scheme::zf;
    Schedule schedule = Schedule::simultaneous;
    UserGroups slots;
    std::vector<int> degenerate;

    std::size_t users() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// One slot per group; slot count is N_g.
inline UserGroups schedule_orthogonal(const Grouping &grouping) { return grouping.members; }

inline UserGroups all_users_slot(std::size_t users)
{
    std::vector<int> all(users);
    std::iota(all.begin(), all.end(), 0);
    return {all};
}

namespace detail
{

inline void check_slots(const UserGroups &slots, std::size_t users)
{
    std::vector<int> seen(users, 0);
    for (const auto &slot : slots)
    {
        if (slot.empty())
            throw InvalidArgument("precoder: empty slot");
        for (int u : slot)
        {
            if (u < 0 || static_cast<std::size_t>(u) >= users || seen[static_cast<std::size_t>(u)]++)
                throw InvalidArgument("precoder: slots must partition the users");
        }
    }
    for (int s : seen)
        if (s != 1)
            throw InvalidArgument("precoder: slots must partition the users");
}

inline void mark_degenerate(PrecodeResult &out, int u, OnDegenerate policy, const char *what)
{
    if (policy == OnDegenerate::raise)
        throw DegenerateUser(static_cast<std::size_t>(u), std::string(what) + ": projected vector is zero");
    out.vectors.col(u).setZero();
    out.degenerate.push_back(u);
}

// Writes sqrt(P) * f / ||f|| into column u, or handles a numerically zero f.
inline void place(PrecodeResult &out, int u, const cvec &f, double reference_norm, double power,
                  const ToleranceParams &tol, OnDegenerate policy, const char *what)
{
    const double norm = f.norm();
    if (!(norm > tol.residual_tol * reference_norm) || !std::isfinite(norm))
        return mark_degenerate(out, u, policy, what);
    out.vectors.col(u) = (std::sqrt(power) / norm) * f;
}

} // namespace detail

/// Classical ZF within each slot: f_u ~ (I - H~_u^+ H~_u) h_u over the other users of the slot.
inline PrecodeResult zf(const cmat &channels, const UserGroups &slots, Schedule schedule, const PowerPolicy &power,
                        const ToleranceParams &tol = {}, OnDegenerate policy = OnDegenerate::raise)
{
    tol.validate();
    const auto users = static_cast<std::size_t>(channels.cols());
    detail::check_slots(slots, users);

    PrecodeResult out;
    out.vectors = cmat::Zero(channels.rows(), channels.cols());
    out.scheme = Scheme::zf;
    out.schedule = schedule;
    out.slots = slots;
    for (const auto &slot : slots)
    {
        if (static_cast<Eigen::Index>(slot.size()) > channels.rows())
            throw InvalidArgument("zf: slot has more users than antennas");
        const double p = power.per_user(slot.size());
        for (int u : slot)
        {
            std::vector<int> others;
            for (int j : slot)
                if (j != u)
                    others.push_back(j);
            const cvec h = channels.col(u);
            const cvec f = nullspace_project(hermitian_rows(channels, others), h, tol);
            detail::place(out, u, f, h.norm(), p, tol, policy, "zf");
        }
    }
    return out;
}

inline PrecodeResult zf(const cmat &channels, const PowerPolicy &power, const ToleranceParams &tol = {},
                        OnDegenerate policy = OnDegenerate::raise)
{
    return zf(channels, all_users_slot(static_cast<std::size_t>(channels.cols())), Schedule::simultaneous, power,
              tol, policy);
}

/// Matched filter, f_u = sqrt(P_u) h_u / ||h_u||, all users in one slot.
inline PrecodeResult mrt(const cmat &channels, const PowerPolicy &power, OnDegenerate policy = OnDegenerate::raise)
{
    PrecodeResult out;
    out.vectors = cmat::Zero(channels.rows(), channels.cols());
    out.scheme = Scheme::mrt;
    out.schedule = Schedule::simultaneous;
    out.slots = all_users_slot(static_cast<std::size_t>(channels.cols()));
    if (channels.cols() == 0)
        return out;
    const double p = power.per_user(static_cast<std::size_t>(channels.cols()));
    ToleranceParams tol;
    for (Eigen::Index u = 0; u < channels.cols(); ++u)
    {
        const cvec h = channels.col(u);
        // any nonzero channel is a valid direction; only an exact zero is degenerate
        detail::place(out, static_cast<int>(u), h, 0.0, p, tol, policy, "mrt");
    }
    return out;
}

/// Unnormalised TZF direction h_V,u kron [(I - P_H) h_H,u], P_H built from the slot's other users.
inline cvec tzf_direction(const cmat &horizontal, const cmat &vertical, const std::vector<int> &slot, int user,
                          const ToleranceParams &tol = {})
{
    std::vector<int> others;
    for (int j : slot)
        if (j != user)
            others.push_back(j);
    const cvec f_h = nullspace_project(hermitian_rows(horizontal, others), horizontal.col(user), tol);
    return kron(cvec(vertical.col(user)), f_h);
}

enum class VerticalProjection
{
    identity, // P_V = I
    rowspace  // P_V = H~_V^+ H~_V
};

/// Tensor form [I_M - (P_V kron P_H)] (h_V,u kron h_H,u) with the M x M operator built explicitly.
/// With VerticalProjection::identity this equals tzf_direction.
inline cvec tzf_tensor_direction(const cmat &horizontal, const cmat &vertical, const std::vector<int> &slot, int user,
                                 VerticalProjection vertical_mode, const ToleranceParams &tol = {})
{
    std::vector<int> others;
    for (int j : slot)
        if (j != user)
            others.push_back(j);
    const cmat p_h = rowspace_projector(hermitian_rows(horizontal, others), tol);
    const cmat p_v = vertical_mode == VerticalProjection::identity
                         ? cmat(cmat::Identity(vertical.rows(), vertical.rows()))
                         : rowspace_projector(hermitian_rows(vertical, others), tol);
    const Eigen::Index m = horizontal.rows() * vertical.rows();
    const cmat op = cmat::Identity(m, m) - kron(p_v, p_h);
    return op * kron(cvec(vertical.col(user)), cvec(horizontal.col(user)));
}

/// Tensor ZF: horizontal-domain ZF combined with vertical-domain MRT, slot by slot.
/// Every slot must hold at most M_H users.
inline PrecodeResult tzf(const cmat &horizontal, const cmat &vertical, const UserGroups &slots, Schedule schedule,
                         const PowerPolicy &power, const ToleranceParams &tol = {},
                         OnDegenerate policy = OnDegenerate::raise)
{
    tol.validate();
    if (horizontal.cols() != vertical.cols())
        throw InvalidArgument("tzf: horizontal and vertical factors disagree on user count");
    const auto users = static_cast<std::size_t>(horizontal.cols());
    detail::check_slots(slots, users);

    PrecodeResult out;
    out.vectors = cmat::Zero(horizontal.rows() * vertical.rows(), horizontal.cols());
    out.scheme = Scheme::tzf;
    out.schedule = schedule;
    out.slots = slots;
    for (const auto &slot : slots)
    {
        if (static_cast<Eigen::Index>(slot.size()) > horizontal.rows())
            throw InvalidArgument("tzf: slot of " + std::to_string(slot.size()) + " users exceeds M_H = " +
                                  std::to_string(horizontal.rows()));
        const double p = power.per_user(slot.size());
        for (int u : slot)
        {
            const cvec f = tzf_direction(horizontal, vertical, slot, u, tol);
            const double ref = horizontal.col(u).norm() * vertical.col(u).norm();
            detail::place(out, u, f, ref, p, tol, policy, "tzf");
        }
    }
    return out;
}

/// Mean-angle ZF. All users transmit at once; user u of group i gets f_V,i kron f_H,u on the rows
/// of sub-array i and zeros elsewhere.
///   f_H,u: ZF of the row-averaged horizontal channel against the other members of group i.
///   f_V,i: ZF of the group's own vertical steering vector against the steering vectors of the other
///          groups, all evaluated at the mean elevations seen by sub-array i.
inline PrecodeResult mzf(const ChannelSet &channels, const Grouping &grouping, const PowerPolicy &power,
                         const ToleranceParams &tol = {}, OnDegenerate policy = OnDegenerate::raise)
{
    tol.validate();
    const int m_h = channels.m_h;
    const int m_v = channels.m_v;
    const int n_g = grouping.n_groups();
    const auto users = channels.users();
    if (grouping.row_blocks.size() != static_cast<std::size_t>(n_g) || grouping.mean_elevation.rows() != n_g ||
        grouping.mean_elevation.cols() != n_g)
        throw InvalidArgument("mzf: grouping is missing row blocks or mean elevations");
    detail::check_slots(grouping.members, users);
    for (int i = 0; i < n_g; ++i)
    {
        const auto &b = grouping.row_blocks[static_cast<std::size_t>(i)];
        if (static_cast<int>(grouping.members[static_cast<std::size_t>(i)].size()) > m_h)
            throw InvalidArgument("mzf: group " + std::to_string(i) + " has more users than M_H");
        if (b.count < n_g)
            throw InvalidArgument("mzf: sub-array " + std::to_string(i) + " has fewer rows than N_g");
        if (b.first < 0 || b.first + b.count > m_v)
            throw InvalidArgument("mzf: sub-array " + std::to_string(i) + " exceeds the array");
    }

    PrecodeResult out;
    out.vectors = cmat::Zero(channels.exact.rows(), channels.exact.cols());
    out.scheme = Scheme::mzf;
    out.schedule = Schedule::simultaneous;
    out.slots = all_users_slot(users);
    if (users == 0)
        return out;
    const double p = power.per_user(users);

    for (int i = 0; i < n_g; ++i)
    {
        const auto &members = grouping.members[static_cast<std::size_t>(i)];
        const auto &block = grouping.row_blocks[static_cast<std::size_t>(i)];
        const auto rows = block.rows();

        cmat steering(block.count, n_g);
        for (int j = 0; j < n_g; ++j)
            steering.col(j) = steering_vertical(grouping.mean_elevation(i, j), block.count);
        std::vector<int> other_groups;
        for (int j = 0; j < n_g; ++j)
            if (j != i)
                other_groups.push_back(j);
        const cvec f_v = nullspace_project(hermitian_rows(steering, other_groups), steering.col(i), tol);
        const bool vertical_ok = f_v.norm() > tol.residual_tol * steering.col(i).norm();

        cmat mean_h(m_h, static_cast<Eigen::Index>(members.size()));
        for (std::size_t k = 0; k < members.size(); ++k)
            mean_h.col(static_cast<Eigen::Index>(k)) =
                mean_horizontal_channel(channels.exact.col(members[k]), m_h, rows);

        for (std::size_t k = 0; k < members.size(); ++k)
        {
            const int u = members[k];
            if (!vertical_ok)
            {
                detail::mark_degenerate(out, u, policy, "mzf elevation beamformer");
                continue;
            }
            std::vector<int> others;
            for (std::size_t l = 0; l < members.size(); ++l)
                if (l != k)
                    others.push_back(static_cast<int>(l));
            const cvec h_bar = mean_h.col(static_cast<Eigen::Index>(k));
            const cvec f_h = nullspace_project(hermitian_rows(mean_h, others), h_bar, tol);
            if (!(f_h.norm() > tol.residual_tol * h_bar.norm()))
            {
                detail::mark_degenerate(out, u, policy, "mzf azimuth beamformer");
                continue;
            }
            cvec full = cvec::Zero(channels.exact.rows());
            full.segment(static_cast<Eigen::Index>(block.first) * m_h, static_cast<Eigen::Index>(block.count) * m_h) =
                kron(f_v, f_h);
            detail::place(out, u, full, 0.0, p, tol, policy, "mzf");
        }
    }
    return out;
}

/// max over slot pairs j != u of |h_j^H f_u| / (||h_j|| ||f_u||); zero vectors are skipped.
inline double max_cross_residual(const cmat &channels, const PrecodeResult &result)
{
    double worst = 0.0;
    for (const auto &slot : result.slots)
        for (int u : slot)
        {
            const double fn = result.vectors.col(u).norm();
            if (fn == 0.0)
                continue;
            for (int j : slot)
            {
                if (j == u)
                    continue;
                const double hn = channels.col(j).norm();
                if (hn == 0.0)
                    continue;
                const double r = std::abs(channels.col(j).dot(result.vectors.col(u))) / (hn * fn);
                worst = std::max(worst, r);
            }
        }
    return worst;
}

} // namespace xlzf
