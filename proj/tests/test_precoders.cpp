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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "test_util.hpp"
#include "xlzf/precoders.hpp"

using namespace xlzf;
using xlzf::testing::pinv_oracle;
using xlzf::testing::random_cmat;
using xlzf::testing::unit_phasors;
using std::numbers::pi;

namespace
{

constexpr double kLambda = 0.15;

double direction_cosine(const cvec &a, const cvec &b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

ChannelSet random_los(std::mt19937_64 &rng, int m_h, int m_v, int users, double d_half_wl, double sigma = 0.02)
{
    const auto g = build_array(m_h, m_v, kLambda);
    const PlacementParams prm{users, 1, d_half_wl, kLambda, pi / 3, pi / 3, sigma};
    return exact_channel(sample_placement(prm, rng), g);
}

// Users on a common radius with fixed directions.
ChannelSet fixed_directions(int m_h, int m_v, double r, const std::vector<double> &phi, double theta)
{
    std::vector<Spherical> s;
    for (double p : phi)
        s.push_back({r, p, theta});
    return exact_channel(make_placement(s), build_array(m_h, m_v, kLambda));
}

double max_residual(const cmat &h, const PrecodeResult &r) { return max_cross_residual(h, r); }

} // namespace

TEST_CASE("zf - examples")
{
    cmat one(3, 1);
    one << 1.0, cplx(0, 2), 2.0;
    const auto r1 = zf(one, PowerPolicy{2.0});
    CHECK((r1.vectors.col(0) - std::sqrt(2.0) * one.col(0) / 3.0).norm() < 1e-15);

    const cmat eye = cmat::Identity(2, 2);
    const auto r2 = zf(eye, PowerPolicy{2.0});
    CHECK((r2.vectors - eye).norm() < 1e-15);
    CHECK(r2.schedule == Schedule::simultaneous);
    CHECK(r2.slots.size() == 1);
}

TEST_CASE("zf - random LOS channels cancel interference")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto c = random_los(rng, 4, 4, 4, 30.0, 0.3);
        const auto r = zf(c.exact, PowerPolicy{});
        CHECK(max_residual(c.exact, r) <= 1e-9);
        for (Eigen::Index u = 0; u < 4; ++u)
            CHECK(std::abs(r.vectors.col(u).squaredNorm() - 0.25) <= 1e-10 * 0.25);
    }
}

TEST_CASE("zf - agrees with an independent projector")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial)
    {
        const cmat h = random_cmat(rng, 12, 5);
        const auto r = zf(h, PowerPolicy{});
        for (int u = 0; u < 5; ++u)
        {
            std::vector<int> others;
            for (int j = 0; j < 5; ++j)
                if (j != u)
                    others.push_back(j);
            const cmat ht = hermitian_rows(h, others);
            const cvec expect = h.col(u) - pinv_oracle(ht) * (ht * h.col(u));
            CHECK(direction_cosine(expect, r.vectors.col(u)) == Catch::Approx(1.0).margin(1e-12));
            // the precoder leans towards the served user
            CHECK(h.col(u).dot(r.vectors.col(u)).real() > 0.0);
        }
    }
}

TEST_CASE("zf - degenerate users")
{
    cmat h(3, 2);
    h.col(0) << 1.0, 2.0, 3.0;
    h.col(1) = h.col(0);
    try
    {
        (void)zf(h, PowerPolicy{});
        FAIL("expected DegenerateUser");
    }
    catch (const DegenerateUser &e)
    {
        CHECK(e.user() == 0);
    }
    const auto z = zf(h, PowerPolicy{}, {}, OnDegenerate::zero);
    CHECK(z.degenerate == std::vector<int>{0, 1});
    CHECK(z.vectors.norm() == 0.0);

    CHECK_THROWS_AS(zf(cmat::Ones(2, 3), PowerPolicy{}), InvalidArgument);
}

TEST_CASE("zf - orthogonal slots only cancel within the slot")
{
    std::mt19937_64 rng(44);
    const cmat h = random_cmat(rng, 6, 4);
    const UserGroups slots{{0, 2}, {1, 3}};
    const auto r = zf(h, slots, Schedule::orthogonal, PowerPolicy{});
    CHECK(r.slots == slots);
    CHECK(std::abs(h.col(2).dot(r.vectors.col(0))) < 1e-9 * h.col(2).norm());
    CHECK(std::abs(h.col(1).dot(r.vectors.col(0))) > 1e-3);
    for (int u = 0; u < 4; ++u)
        CHECK(r.vectors.col(u).squaredNorm() == Catch::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(zf(h, UserGroups{{0, 1}, {1, 2, 3}}, Schedule::orthogonal, PowerPolicy{}), InvalidArgument);
    CHECK_THROWS_AS(zf(h, UserGroups{{0, 1}}, Schedule::orthogonal, PowerPolicy{}), InvalidArgument);
}

TEST_CASE("mrt - examples")
{
    cmat h(2, 1);
    h << 1.0, cplx(0, 1);
    const auto r = mrt(h, PowerPolicy{});
    CHECK((r.vectors.col(0) - h.col(0) / std::sqrt(2.0)).norm() < 1e-15);

    cmat same(3, 2);
    same.col(0) << 1.0, 2.0, cplx(0, 1);
    same.col(1) = same.col(0);
    const auto r2 = mrt(same, PowerPolicy{});
    CHECK((r2.vectors.col(0) - r2.vectors.col(1)).norm() == 0.0);

    CHECK_THROWS_AS(mrt(cmat::Zero(3, 1), PowerPolicy{}), DegenerateUser);
    CHECK(mrt(cmat::Zero(3, 1), PowerPolicy{}, OnDegenerate::zero).degenerate == std::vector<int>{0});
}

TEST_CASE("tzf - single user is Kronecker MRT")
{
    std::mt19937_64 rng(45);
    const cmat hh = unit_phasors(rng, 6);
    const cmat hv = unit_phasors(rng, 4);
    const auto r = tzf(hh, hv, all_users_slot(1), Schedule::simultaneous, PowerPolicy{3.0});
    const cvec expect = std::sqrt(3.0) * kron(cvec(hv.col(0)), cvec(hh.col(0))) / std::sqrt(24.0);
    CHECK((r.vectors.col(0) - expect).norm() < 1e-14);
}

TEST_CASE("tzf - exact cancellation for shared vertical factor")
{
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 20; ++trial)
    {
        const int m_h = 8, m_v = 5, u = 5;
        cmat hh(m_h, u), hv(m_v, u);
        const cvec shared = unit_phasors(rng, m_v);
        for (int k = 0; k < u; ++k)
        {
            hh.col(k) = unit_phasors(rng, m_h);
            hv.col(k) = shared;
        }
        cmat full(m_h * m_v, u);
        for (int k = 0; k < u; ++k)
            full.col(k) = kron(cvec(hv.col(k)), cvec(hh.col(k)));
        const auto r = tzf(hh, hv, all_users_slot(u), Schedule::simultaneous, PowerPolicy{});
        CHECK(max_residual(full, r) <= 1e-9);
    }
}

TEST_CASE("tzf - tensor form equals the factored form")
{
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 10; ++trial)
    {
        const cmat hh = random_cmat(rng, 6, 4);
        const cmat hv = random_cmat(rng, 3, 4);
        const std::vector<int> slot{0, 1, 2, 3};
        for (int u = 0; u < 4; ++u)
        {
            const cvec a = tzf_direction(hh, hv, slot, u);
            const cvec b = tzf_tensor_direction(hh, hv, slot, u, VerticalProjection::identity);
            CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
        }
    }
}

TEST_CASE("tzf - reduces to ZF on a horizontal array")
{
    std::mt19937_64 rng(48);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto c = random_los(rng, 12, 1, 5, 1e3, 0.3);
        const auto &f = c.planewave;
        const auto t = tzf(f.horizontal, f.vertical, all_users_slot(5), Schedule::simultaneous, PowerPolicy{});
        cmat kr(12, 5);
        for (int k = 0; k < 5; ++k)
            kr.col(k) = kron(cvec(f.vertical.col(k)), cvec(f.horizontal.col(k)));
        const auto z = zf(kr, PowerPolicy{});
        for (int k = 0; k < 5; ++k)
            CHECK(direction_cosine(t.vectors.col(k), z.vectors.col(k)) == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("tzf - slot larger than M_H is rejected")
{
    const cmat hh = cmat::Ones(2, 3), hv = cmat::Ones(2, 3);
    CHECK_THROWS_AS(tzf(hh, hv, all_users_slot(3), Schedule::simultaneous, PowerPolicy{}), InvalidArgument);
    CHECK_THROWS_AS(tzf(hh, hv, UserGroups{{0, 1}, {2}}, Schedule::orthogonal, PowerPolicy{}), DegenerateUser);
}

TEST_CASE("mzf - one group at zero elevation cancels intra-group interference in the far field")
{
    const std::vector<double> phi{-0.5, -0.1, 0.2, 0.45};
    const auto c = fixed_directions(16, 12, 1e5 * kLambda / 2, phi, 0.0);
    std::vector<double> centroid(phi.size(), 0.0);
    const auto grp = build_grouping(c.angles, centroid, 2 * pi / 180);
    REQUIRE(grp.n_groups() == 1);
    const auto r = mzf(c, grp, PowerPolicy{});
    CHECK(max_residual(c.exact, r) <= 1e-6);
    // the vertical beamformer is the group's own steering vector
    const cvec col0 = r.vectors.col(0);
    cvec vertical(12);
    for (int n = 0; n < 12; ++n)
        vertical(n) = col0(n * 16) / col0(0);
    const cvec expect = steering_vertical(grp.mean_elevation(0, 0), 12) / steering_vertical(grp.mean_elevation(0, 0), 12)(0);
    CHECK((vertical - expect).norm() < 1e-9);
}

TEST_CASE("mzf - residual shrinks with distance at non-zero elevation")
{
    const std::vector<double> phi{-0.4, 0.0, 0.35};
    std::vector<double> residual;
    for (double d : {1e3, 1e4, 1e5})
    {
        const auto c = fixed_directions(16, 12, d * kLambda / 2, phi, 0.3);
        const std::vector<double> centroid(phi.size(), 0.3);
        const auto grp = build_grouping(c.angles, centroid, 2 * pi / 180);
        REQUIRE(grp.n_groups() == 1);
        residual.push_back(max_residual(c.exact, mzf(c, grp, PowerPolicy{})));
    }
    CHECK(residual[0] > residual[1]);
    CHECK(residual[1] > residual[2]);
}

namespace
{

Grouping manual_grouping(const ChannelSet &c, UserGroups members, std::vector<int> counts)
{
    Grouping g;
    g.members = std::move(members);
    for (const auto &m : g.members)
        g.sizes.push_back(static_cast<int>(m.size()));
    g.row_counts = counts;
    std::vector<int> order(counts.size());
    std::iota(order.begin(), order.end(), 0);
    g.row_blocks = assign_row_blocks(g.row_counts, order, c.m_v);
    g.mean_elevation = group_mean_elevations(c.angles, g.members, g.row_blocks);
    return g;
}

} // namespace

TEST_CASE("mzf - equal elevations across groups are degenerate")
{
    const auto c = fixed_directions(2, 4, 50.0, {-0.3, 0.3}, 0.2);
    const auto g = manual_grouping(c, {{0}, {1}}, {2, 2});
    CHECK_THROWS_AS(mzf(c, g, PowerPolicy{}), DegenerateUser);
    const auto z = mzf(c, g, PowerPolicy{}, {}, OnDegenerate::zero);
    CHECK(z.degenerate.size() == 2);
}

TEST_CASE("mzf - support and power")
{
    std::vector<Spherical> s{{40.0, -0.3, -0.4}, {40.0, 0.3, 0.5}};
    const auto c = exact_channel(make_placement(s), build_array(2, 4, kLambda));
    const auto g = manual_grouping(c, {{0}, {1}}, {2, 2});
    const auto r = mzf(c, g, PowerPolicy{});
    CHECK(r.vectors.col(0).tail(4).norm() == 0.0);
    CHECK(r.vectors.col(0).head(4).norm() > 0.0);
    CHECK(r.vectors.col(1).head(4).norm() == 0.0);
    for (int u = 0; u < 2; ++u)
        CHECK(r.vectors.col(u).squaredNorm() == Catch::Approx(0.5).epsilon(1e-10));
    CHECK(r.schedule == Schedule::simultaneous);

    auto bad = g;
    bad.row_blocks[0].count = 1;
    CHECK_THROWS_AS(mzf(c, bad, PowerPolicy{}), InvalidArgument);
}

TEST_CASE("schedule_orthogonal - one slot per group")
{
    std::mt19937_64 rng(50);
    const auto c = random_los(rng, 16, 12, 6, 300.0, 0.2);
    std::vector<double> centroid;
    for (Eigen::Index u = 0; u < 6; ++u)
        centroid.push_back(c.planewave.elevation(u));
    const auto g = build_grouping(c.angles, centroid, 2 * pi / 180);
    const auto slots = schedule_orthogonal(g);
    CHECK(slots.size() == static_cast<std::size_t>(g.n_groups()));
    std::vector<int> all;
    for (const auto &s : slots)
        all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("precoders - common channel scaling keeps every direction")
{
    std::mt19937_64 rng(51);
    const auto c = random_los(rng, 8, 6, 4, 100.0, 0.3);
    const cmat scaled = 3.7 * c.exact;
    const auto a = zf(c.exact, PowerPolicy{}), b = zf(scaled, PowerPolicy{});
    const auto ma = mrt(c.exact, PowerPolicy{}), mb = mrt(scaled, PowerPolicy{});
    const auto &f = c.planewave;
    const auto ta = tzf(f.horizontal, f.vertical, all_users_slot(4), Schedule::simultaneous, PowerPolicy{});
    const auto tb = tzf(cmat(2.0 * f.horizontal), cmat(1.85 * f.vertical), all_users_slot(4), Schedule::simultaneous,
                        PowerPolicy{});
    for (int u = 0; u < 4; ++u)
    {
        CHECK(direction_cosine(a.vectors.col(u), b.vectors.col(u)) == Catch::Approx(1.0).margin(1e-12));
        CHECK(direction_cosine(ma.vectors.col(u), mb.vectors.col(u)) == Catch::Approx(1.0).margin(1e-12));
        CHECK(direction_cosine(ta.vectors.col(u), tb.vectors.col(u)) == Catch::Approx(1.0).margin(1e-12));
    }
}
