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
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xlzf/errors.hpp"

namespace xlzf
{

using Vec3 = Eigen::Vector3d;

/// Uniform rectangular array in the y-z plane with boresight along +x.
/// Element (m, n), zero-based, sits at [0, (m - (M_H-1)/2), (n - (M_V-1)/2)] * lambda/2 and
/// has linear index m + n * M_H, matching the channel stacking.
struct ArrayGeometry
{
    int m_h = 0;
    int m_v = 0;
    double wavelength = 0.0;
    std::vector<Vec3> positions;

    std::size_t size() const { return positions.size(); }
    std::size_t index(int m, int n) const { return static_cast<std::size_t>(m + n * m_h); }
};

inline ArrayGeometry build_array(int m_h, int m_v, double wavelength)
{
    if (m_h < 1 || m_v < 1)
        throw InvalidArgument("build_array: array dimensions must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw InvalidArgument("build_array: wavelength must be positive and finite");

    ArrayGeometry g;
    g.m_h = m_h;
    g.m_v = m_v;
    g.wavelength = wavelength;
    g.positions.reserve(static_cast<std::size_t>(m_h) * static_cast<std::size_t>(m_v));
    const double half = wavelength / 2.0;
    for (int n = 0; n < m_v; ++n)
        for (int m = 0; m < m_h; ++m)
            g.positions.emplace_back(0.0,
                                     (m - (m_h - 1) / 2.0) * half,
                                     (n - (m_v - 1) / 2.0) * half);
    return g;
}

/// Radius in meters, azimuth from +x towards +y, elevation from the x-y plane.
struct Spherical
{
    double r = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

inline Vec3 spherical_to_cartesian(const Spherical &s)
{
    const double ct = std::cos(s.theta);
    return {s.r * ct * std::cos(s.phi), s.r * ct * std::sin(s.phi), s.r * std::sin(s.theta)};
}

// atan2(0, 0) = 0 and the origin maps to (0, 0, 0).
inline Spherical cartesian_to_spherical(const Vec3 &p)
{
    Spherical s;
    s.r = p.norm();
    s.phi = std::atan2(p.y(), p.x());
    s.theta = s.r > 0.0 ? std::asin(std::clamp(p.z() / s.r, -1.0, 1.0)) : 0.0;
    return s;
}

struct UserPlacement
{
    std::vector<Spherical> spherical;
    std::vector<Vec3> cartesian;
    std::vector<int> cluster_of; // zero-based cluster index per user
    int n_clusters = 1;

    std::size_t count() const { return spherical.size(); }
};

/// Builds a placement from spherical coordinates; every user lands in cluster 0 unless given.
inline UserPlacement make_placement(std::vector<Spherical> users, std::vector<int> cluster_of = {},
                                    int n_clusters = 1)
{
    UserPlacement p;
    p.spherical = std::move(users);
    p.cartesian.reserve(p.spherical.size());
    for (const auto &s : p.spherical)
        p.cartesian.push_back(spherical_to_cartesian(s));
    if (cluster_of.empty())
        cluster_of.assign(p.spherical.size(), 0);
    if (cluster_of.size() != p.spherical.size())
        throw InvalidArgument("make_placement: cluster_of size differs from user count");
    p.cluster_of = std::move(cluster_of);
    p.n_clusters = n_clusters;
    return p;
}

/// Per (element, user) distance and arrival angles of Delta = p_u - q_{m,n}.
/// Matrices are M x U with the element index along rows.
struct PropagationAngles
{
    int m_h = 0;
    int m_v = 0;
    Eigen::MatrixXd distance;
    Eigen::MatrixXd azimuth;
    Eigen::MatrixXd elevation;

    std::size_t users() const { return static_cast<std::size_t>(distance.cols()); }
};

inline PropagationAngles propagation_angles(const UserPlacement &placement, const ArrayGeometry &geometry)
{
    const auto m = static_cast<Eigen::Index>(geometry.size());
    const auto u = static_cast<Eigen::Index>(placement.count());
    PropagationAngles a;
    a.m_h = geometry.m_h;
    a.m_v = geometry.m_v;
    a.distance.resize(m, u);
    a.azimuth.resize(m, u);
    a.elevation.resize(m, u);
    for (Eigen::Index k = 0; k < u; ++k)
    {
        const Vec3 &p = placement.cartesian[static_cast<std::size_t>(k)];
        for (Eigen::Index i = 0; i < m; ++i)
        {
            const Vec3 delta = p - geometry.positions[static_cast<std::size_t>(i)];
            const double r = delta.norm();
            if (!(r > 0.0))
                throw DegenerateGeometry("propagation_angles: user " + std::to_string(k) +
                                         " coincides with antenna element " + std::to_string(i));
            a.distance(i, k) = r;
            a.azimuth(i, k) = std::atan2(delta.y(), delta.x());
            a.elevation(i, k) = std::asin(std::clamp(delta.z() / r, -1.0, 1.0));
        }
    }
    return a;
}

/// Cluster sizes: the first U mod N_c clusters take ceil(U/N_c) users, the rest floor(U/N_c).
inline std::vector<int> cluster_sizes(int users, int n_clusters)
{
    if (n_clusters < 1 || users < n_clusters)
        throw InvalidArgument("cluster_sizes: need 1 <= N_c <= U (got U=" + std::to_string(users) +
                              ", N_c=" + std::to_string(n_clusters) + ")");
    std::vector<int> sizes(static_cast<std::size_t>(n_clusters), users / n_clusters);
    for (int g = 0; g < users % n_clusters; ++g)
        ++sizes[static_cast<std::size_t>(g)];
    return sizes;
}

/// Random user drop parameters. Angles in radians; d in half-wavelength units.
struct PlacementParams
{
    int users = 20;
    int n_clusters = 2;
    double d_half_wl = 1e4;
    double wavelength = 0.0;
    double s_az = 0.0;
    double s_el = 0.0;
    double sigma_g = 0.0;
};

inline constexpr double kElevationClampMargin = 1e-6;

/// r_u ~ U[d, 2d] * lambda/2, phi_u ~ U[-s_az, s_az], cluster means mu_g ~ U[-s_el, s_el],
/// theta_u ~ N(mu_g, sigma_g) clamped to +-(pi/2 - 1e-6). Users are assigned to clusters in
/// contiguous blocks. Draw order is fixed (radii, azimuths, means, elevations) so a seeded
/// generator reproduces the placement bit for bit.
template <std::uniform_random_bit_generator Rng>
UserPlacement sample_placement(const PlacementParams &prm, Rng &rng)
{
    if (prm.users < 1)
        throw InvalidArgument("sample_placement: U must be at least 1");
    if (prm.n_clusters < 1 || prm.users < prm.n_clusters)
        throw InvalidArgument("sample_placement: need 1 <= N_c <= U");
    if (!(prm.d_half_wl > 0.0))
        throw InvalidArgument("sample_placement: d must be positive");
    if (!(prm.wavelength > 0.0))
        throw InvalidArgument("sample_placement: wavelength must be positive");
    if (prm.s_az < 0.0 || prm.s_el < 0.0 || prm.sigma_g < 0.0)
        throw InvalidArgument("sample_placement: spreads must be non-negative");

    const auto u = static_cast<std::size_t>(prm.users);
    const double half = prm.wavelength / 2.0;
    std::vector<Spherical> users(u);

    std::uniform_real_distribution<double> radius(prm.d_half_wl, 2.0 * prm.d_half_wl);
    for (auto &s : users)
        s.r = radius(rng) * half;

    std::uniform_real_distribution<double> azimuth(-prm.s_az, prm.s_az);
    for (auto &s : users)
        s.phi = prm.s_az > 0.0 ? azimuth(rng) : 0.0;

    std::vector<double> means(static_cast<std::size_t>(prm.n_clusters));
    std::uniform_real_distribution<double> mean_el(-prm.s_el, prm.s_el);
    for (auto &mu : means)
        mu = prm.s_el > 0.0 ? mean_el(rng) : 0.0;

    std::vector<int> cluster_of;
    cluster_of.reserve(u);
    const auto sizes = cluster_sizes(prm.users, prm.n_clusters);
    for (std::size_t g = 0; g < sizes.size(); ++g)
        cluster_of.insert(cluster_of.end(), static_cast<std::size_t>(sizes[g]), static_cast<int>(g));

    const double limit = std::numbers::pi / 2.0 - kElevationClampMargin;
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    for (std::size_t k = 0; k < u; ++k)
    {
        const double mu = means[static_cast<std::size_t>(cluster_of[k])];
        const double theta = prm.sigma_g > 0.0 ? mu + prm.sigma_g * unit_normal(rng) : mu;
        users[k].theta = std::clamp(theta, -limit, limit);
    }

    return make_placement(std::move(users), std::move(cluster_of), prm.n_clusters);
}

} // namespace xlzf
