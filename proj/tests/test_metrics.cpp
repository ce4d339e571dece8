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
#include <random>

#include "test_util.hpp"
#include "xlzf/metrics.hpp"

using namespace xlzf;
using xlzf::testing::random_cmat;

namespace
{

PrecodeResult simultaneous(cmat vectors)
{
    PrecodeResult p;
    p.slots = all_users_slot(static_cast<std::size_t>(vectors.cols()));
    p.vectors = std::move(vectors);
    return p;
}

// Direct evaluation of the SINR formula with explicit loops over every pair in the slot.
double sinr_oracle(const cmat &h, const cmat &f, const std::vector<int> &slot, int u, double noise)
{
    std::complex<double> s = 0.0;
    for (Eigen::Index m = 0; m < h.rows(); ++m)
        s += std::conj(h(m, u)) * f(m, u);
    double interference = 0.0;
    for (int p : slot)
    {
        if (p == u)
            continue;
        std::complex<double> leak = 0.0;
        for (Eigen::Index m = 0; m < h.rows(); ++m)
            leak += std::conj(h(m, u)) * f(m, p);
        interference += std::norm(leak);
    }
    return std::norm(s) / (interference + noise);
}

} // namespace

TEST_CASE("sinr - examples")
{
    cmat h(2, 1), f(2, 1);
    h << 1.0, 1.0;
    f << 1.0, 1.0; // h^H f = 2
    CHECK(sinr(h, simultaneous(f), {}, 1e-2)[0] == Catch::Approx(400.0).epsilon(1e-14));
    CHECK(sinr(h, simultaneous(cmat::Zero(2, 1)), {}, 1e-2)[0] == 0.0);

    cmat h2(2, 2), f2(2, 2);
    h2.col(0) << 1.0, 0.0;
    h2.col(1) << 0.0, 1.0;
    f2.col(0) << 1.0, 0.0;
    f2.col(1) = f2.col(0);
    const auto s = sinr(h2, simultaneous(f2), {}, 1e-2);
    CHECK(s[0] == Catch::Approx(1.0 / 1.01));
    CHECK(s[0] < 1.0);

    CHECK_THROWS_AS(sinr(h, simultaneous(f), {}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(sinr(h2, simultaneous(f), {}, 1.0), InvalidArgument);
}

TEST_CASE("sinr - matches the formula and splits intra and inter terms")
{
    std::mt19937_64 rng(61);
    const cmat h = random_cmat(rng, 6, 4);
    const cmat f = random_cmat(rng, 6, 4);
    const UserGroups groups{{0, 1}, {2, 3}};
    const auto p = simultaneous(f);
    const auto s = sinr(h, p, groups, 0.3);
    const auto terms = sinr_terms(h, p, groups);
    for (int u = 0; u < 4; ++u)
    {
        CHECK(s[static_cast<std::size_t>(u)] == Catch::Approx(sinr_oracle(h, f, {0, 1, 2, 3}, u, 0.3)).epsilon(1e-12));
        CHECK(terms[static_cast<std::size_t>(u)].intra > 0.0);
        CHECK(terms[static_cast<std::size_t>(u)].inter > 0.0);
    }
    // attribution does not change the total
    const auto s_single = sinr(h, p, {}, 0.3);
    for (std::size_t u = 0; u < 4; ++u)
        CHECK(s_single[u] == Catch::Approx(s[u]).epsilon(1e-14));

    // orthogonal slots: no interference from other slots
    PrecodeResult orth = p;
    orth.schedule = Schedule::orthogonal;
    orth.slots = groups;
    const auto to = sinr_terms(h, orth, groups);
    for (int u = 0; u < 4; ++u)
    {
        CHECK(to[static_cast<std::size_t>(u)].inter == 0.0);
        const auto &slot = groups[static_cast<std::size_t>(u / 2)];
        CHECK(sinr(h, orth, groups, 0.3)[static_cast<std::size_t>(u)] ==
              Catch::Approx(sinr_oracle(h, f, slot, u, 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("sinr - invariant to a global phase on any precoder")
{
    std::mt19937_64 rng(62);
    const cmat h = random_cmat(rng, 5, 3);
    cmat f = random_cmat(rng, 5, 3);
    const auto before = sinr(h, simultaneous(f), {}, 0.1);
    f.col(1) *= std::polar(1.0, 1.234);
    const auto after = sinr(h, simultaneous(f), {}, 0.1);
    for (std::size_t u = 0; u < 3; ++u)
        CHECK(after[u] == Catch::Approx(before[u]).epsilon(1e-13));
}

TEST_CASE("sinr - ZF leaves only the beamforming gain")
{
    std::mt19937_64 rng(63);
    const double lambda = 0.15;
    const auto g = build_array(8, 6, lambda);
    const auto c = exact_channel(sample_placement(PlacementParams{5, 1, 80.0, lambda, 1.0, 1.0, 0.3}, rng), g);
    const auto p = zf(c.exact, PowerPolicy{});
    REQUIRE(max_cross_residual(c.exact, p) <= 1e-9);
    const auto s = sinr(c.exact, p, {}, 1e-2);
    for (int u = 0; u < 5; ++u)
    {
        const double gain = std::norm(c.exact.col(u).dot(p.vectors.col(u))) / 1e-2;
        CHECK(s[static_cast<std::size_t>(u)] == Catch::Approx(gain).epsilon(1e-6));
    }
}

TEST_CASE("sum_rate and normalize_rate - examples")
{
    CHECK(sum_rate(std::vector<double>{1.0, 3.0}) == Catch::Approx(3.0).epsilon(1e-15));
    CHECK(sum_rate(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(sum_rate(std::vector<double>{400.0}) == Catch::Approx(8.6475).margin(1e-4));
    CHECK(sum_rate(std::vector<double>{}) == 0.0);
    CHECK_THROWS_AS(sum_rate(std::vector<double>{-1.0}), InvalidArgument);

    CHECK(normalize_rate(6.0, 2) == 3.0);
    CHECK(normalize_rate(4.25, 1) == 4.25);
    CHECK(normalize_rate(0.0, 5) == 0.0);
    CHECK_THROWS_AS(normalize_rate(1.0, 0), InvalidArgument);
}

TEST_CASE("median and ecdf - examples")
{
    CHECK(median({1.0, 2.0, 3.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK(median({7.0}) == 7.0);
    CHECK_THROWS_AS(median({}), InvalidArgument);

    const auto e = ecdf({5.0});
    REQUIRE(e.size() == 1);
    CHECK(e[0] == std::pair<double, double>{5.0, 1.0});
    const auto e3 = ecdf({3.0, 1.0, 2.0, 2.0});
    CHECK(e3[0].first == 1.0);
    CHECK(e3[0].second == 0.25);
    CHECK(e3[3].first == 3.0);
    CHECK(e3[3].second == 1.0);
    CHECK_THROWS_AS(ecdf({}), InvalidArgument);
}

TEST_CASE("median - agrees with a sort-based oracle")
{
    std::mt19937_64 rng(64);
    std::uniform_int_distribution<int> len(1, 50);
    std::normal_distribution<double> x(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> v(static_cast<std::size_t>(len(rng)));
        for (auto &e : v)
            e = x(rng);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double expect = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        CHECK(median(v) == Catch::Approx(expect).margin(1e-15));
    }
}

TEST_CASE("measure - sum-rate bookkeeping")
{
    std::mt19937_64 rng(65);
    const cmat h = random_cmat(rng, 6, 4);
    const UserGroups groups{{0, 1}, {2, 3}};
    const auto orth = zf(h, groups, Schedule::orthogonal, PowerPolicy{});
    const auto rec = measure(h, orth, groups, 1e-2, "ZF-ortho", 77);
    CHECK(rec.n_slots == 2);
    CHECK(rec.sum_rate == Catch::Approx(sum_rate(rec.per_user_sinr)).epsilon(1e-12));
    CHECK(rec.normalized_sum_rate == Catch::Approx(rec.sum_rate / 2).epsilon(1e-15));
    CHECK(rec.trial_seed == 77);
    CHECK(rec.scheme == "ZF-ortho");

    const auto sim = zf(h, PowerPolicy{});
    const auto rs = measure(h, sim, {}, 1e-2, "ZF", 1);
    CHECK(rs.normalized_sum_rate == rs.sum_rate);
    CHECK(rs.n_slots == 1);
}
