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
#include <concepts>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "xlzf/geometry.hpp"
#include "xlzf/numerics.hpp"

namespace xlzf
{

/// Gain policy: maps (user, Delta_{u,m,n}) to gamma_{u,m,n} >= 0.
template <class G>
concept GainPolicy = requires(const G &g, std::size_t user, const Vec3 &delta) {
    { g(user, delta) } -> std::convertible_to<double>;
};

/// gamma = 1 everywhere (no pathloss, isotropic elements).
struct UnitGain
{
    double operator()(std::size_t, const Vec3 &) const { return 1.0; }
};

/// Far-field Kronecker factors per user: h_u ~ sqrt(gamma_u) (h_V,u kron h_H,u) up to a common phase.
struct PlaneWaveFactors
{
    cmat horizontal;         // M_H x U
    cmat vertical;           // M_V x U
    Eigen::VectorXd gain;    // gamma_u
    Eigen::VectorXd azimuth; // centroid angles phi_u
    Eigen::VectorXd elevation;
};

struct ChannelSet
{
    int m_h = 0;
    int m_v = 0;
    double wavelength = 0.0;
    cmat exact;            // M x U, column u is h_u
    Eigen::MatrixXd gains; // M x U
    PropagationAngles angles;
    PlaneWaveFactors planewave;

    std::size_t users() const { return static_cast<std::size_t>(exact.cols()); }
};

/// Vertical ULA steering vector, entry n: exp(-j pi (n - (L-1)/2) sin(theta)).
inline cvec steering_vertical(double theta, int length)
{
    if (length < 1)
        throw InvalidArgument("steering_vertical: length must be positive");
    cvec v(length);
    const double s = std::sin(theta);
    for (int n = 0; n < length; ++n)
        v(n) = std::polar(1.0, -std::numbers::pi * (n - (length - 1) / 2.0) * s);
    return v;
}

/// Horizontal ULA steering vector, entry m: exp(-j pi (m - (L-1)/2) cos(theta) sin(phi)).
inline cvec steering_horizontal(double phi, double theta, int length)
{
    if (length < 1)
        throw InvalidArgument("steering_horizontal: length must be positive");
    cvec v(length);
    const double s = std::cos(theta) * std::sin(phi);
    for (int m = 0; m < length; ++m)
        v(m) = std::polar(1.0, -std::numbers::pi * (m - (length - 1) / 2.0) * s);
    return v;
}

/// Plane-wave factors from the users' centroid directions.
inline PlaneWaveFactors planewave_factors(const UserPlacement &placement, const ArrayGeometry &geometry)
{
    const auto u = static_cast<Eigen::Index>(placement.count());
    PlaneWaveFactors f;
    f.horizontal.resize(geometry.m_h, u);
    f.vertical.resize(geometry.m_v, u);
    f.gain = Eigen::VectorXd::Ones(u);
    f.azimuth.resize(u);
    f.elevation.resize(u);
    for (Eigen::Index k = 0; k < u; ++k)
    {
        const Spherical s = cartesian_to_spherical(placement.cartesian[static_cast<std::size_t>(k)]);
        f.azimuth(k) = s.phi;
        f.elevation(k) = s.theta;
        f.horizontal.col(k) = steering_horizontal(s.phi, s.theta, geometry.m_h);
        f.vertical.col(k) = steering_vertical(s.theta, geometry.m_v);
    }
    return f;
}

/// Exact spherical-wave LOS channel, [h_u]_{m + n M_H} = sqrt(gamma) exp(+j 2 pi / lambda * r_{u,m,n}).
///
/// The exponent sign is chosen so that the received phase in y = h^H f is the propagation
/// delay exp(-j k r), which also makes the far-field limit coincide with planewave_factors
/// (both use the exp(-j pi ...) steering convention).
template <GainPolicy Gain = UnitGain>
ChannelSet exact_channel(const UserPlacement &placement, const ArrayGeometry &geometry, const Gain &gain = {})
{
    ChannelSet c;
    c.m_h = geometry.m_h;
    c.m_v = geometry.m_v;
    c.wavelength = geometry.wavelength;
    c.angles = propagation_angles(placement, geometry);

    const auto m = static_cast<Eigen::Index>(geometry.size());
    const auto u = static_cast<Eigen::Index>(placement.count());
    const double k = 2.0 * std::numbers::pi / geometry.wavelength;
    c.exact.resize(m, u);
    c.gains.resize(m, u);
    for (Eigen::Index col = 0; col < u; ++col)
    {
        const Vec3 &p = placement.cartesian[static_cast<std::size_t>(col)];
        for (Eigen::Index i = 0; i < m; ++i)
        {
            const double g = static_cast<double>(gain(static_cast<std::size_t>(col),
                                                      p - geometry.positions[static_cast<std::size_t>(i)]));
            if (!(g >= 0.0))
                throw InvalidArgument("exact_channel: gain policy returned a negative or NaN gain");
            c.gains(i, col) = g;
            c.exact(i, col) = std::polar(std::sqrt(g), k * c.angles.distance(i, col));
        }
    }
    c.planewave = planewave_factors(placement, geometry);
    c.planewave.gain = c.gains.colwise().mean().transpose();
    return c;
}

enum class SubarrayKind
{
    horizontal, // one row of the URA, length M_H
    vertical    // one column of the URA, length M_V
};

/// Horizontal index p selects entries {m + p M_H}; vertical index q selects {q + n M_H}. Zero-based.
inline cvec subarray_channel(const cvec &h, int m_h, int m_v, SubarrayKind kind, int index)
{
    if (m_h < 1 || m_v < 1 || h.size() != static_cast<Eigen::Index>(m_h) * m_v)
        throw InvalidArgument("subarray_channel: channel length does not match M_H * M_V");
    if (kind == SubarrayKind::horizontal)
    {
        if (index < 0 || index >= m_v)
            throw InvalidArgument("subarray_channel: horizontal index " + std::to_string(index) + " out of range");
        return h.segment(static_cast<Eigen::Index>(index) * m_h, m_h);
    }
    if (index < 0 || index >= m_h)
        throw InvalidArgument("subarray_channel: vertical index " + std::to_string(index) + " out of range");
    cvec out(m_v);
    for (int n = 0; n < m_v; ++n)
        out(n) = h(index + static_cast<Eigen::Index>(n) * m_h);
    return out;
}

/// Arithmetic mean of the horizontal sub-array channels over the selected rows.
inline cvec mean_horizontal_channel(const cvec &h, int m_h, std::span<const int> rows)
{
    if (rows.empty())
        throw InvalidArgument("mean_horizontal_channel: empty row set");
    if (m_h < 1 || h.size() % m_h != 0)
        throw InvalidArgument("mean_horizontal_channel: channel length is not a multiple of M_H");
    const int m_v = static_cast<int>(h.size() / m_h);
    cvec acc = cvec::Zero(m_h);
    for (int row : rows)
        acc += subarray_channel(h, m_h, m_v, SubarrayKind::horizontal, row);
    return acc / static_cast<double>(rows.size());
}

/// Mean of theta_{u,m,n} over every element of the selected rows.
inline double mean_elevation(const PropagationAngles &angles, std::size_t user, std::span<const int> rows)
{
    if (rows.empty())
        throw InvalidArgument("mean_elevation: empty row set");
    if (user >= angles.users())
        throw InvalidArgument("mean_elevation: user index out of range");
    double sum = 0.0;
    const auto col = static_cast<Eigen::Index>(user);
    for (int row : rows)
    {
        if (row < 0 || row >= angles.m_v)
            throw InvalidArgument("mean_elevation: row " + std::to_string(row) + " out of range");
        sum += angles.elevation.col(col).segment(static_cast<Eigen::Index>(row) * angles.m_h, angles.m_h).sum();
    }
    return sum / (static_cast<double>(rows.size()) * angles.m_h);
}

/// min over psi of ||a - e^{j psi} b||_2, i.e. the distance after removing the best common phase.
inline double phase_aligned_distance(const cvec &a, const cvec &b)
{
    const double v = a.squaredNorm() + b.squaredNorm() - 2.0 * std::abs(b.dot(a));
    return std::sqrt(std::max(v, 0.0));
}

// ---- text dump ----------------------------------------------------------
//
// xlzf-channel-dump v1
// m_h <M_H> m_v <M_V> u <U> wavelength <lambda>
// then M lines, line i = antenna index i, holding "re im" for users 0..U-1.
// Doubles are written with 17 significant digits so a read-back is exact.

struct ChannelDump
{
    int m_h = 0;
    int m_v = 0;
    double wavelength = 0.0;
    cmat exact;
};

inline void write_channel_dump(std::ostream &os, const ChannelSet &c)
{
    os << "xlzf-channel-dump v1\n";
    os << std::setprecision(17);
    os << "m_h " << c.m_h << " m_v " << c.m_v << " u " << c.exact.cols() << " wavelength " << c.wavelength << '\n';
    for (Eigen::Index i = 0; i < c.exact.rows(); ++i)
    {
        for (Eigen::Index k = 0; k < c.exact.cols(); ++k)
        {
            if (k > 0)
                os << ' ';
            os << c.exact(i, k).real() << ' ' << c.exact(i, k).imag();
        }
        os << '\n';
    }
}

inline ChannelDump read_channel_dump(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line) || line != "xlzf-channel-dump v1")
        throw InvalidArgument("read_channel_dump: missing or unknown header");
    ChannelDump d;
    std::string k1, k2, k3, k4;
    Eigen::Index users = 0;
    if (!std::getline(is, line))
        throw InvalidArgument("read_channel_dump: missing dimension line");
    std::istringstream dims(line);
    if (!(dims >> k1 >> d.m_h >> k2 >> d.m_v >> k3 >> users >> k4 >> d.wavelength) || k1 != "m_h" || k2 != "m_v" ||
        k3 != "u" || k4 != "wavelength" || d.m_h < 1 || d.m_v < 1 || users < 0)
        throw InvalidArgument("read_channel_dump: malformed dimension line");
    const Eigen::Index m = static_cast<Eigen::Index>(d.m_h) * d.m_v;
    d.exact.resize(m, users);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        if (!std::getline(is, line))
            throw InvalidArgument("read_channel_dump: truncated at antenna " + std::to_string(i));
        std::istringstream row(line);
        for (Eigen::Index k = 0; k < users; ++k)
        {
            double re = 0.0, im = 0.0;
            if (!(row >> re >> im))
                throw InvalidArgument("read_channel_dump: short row at antenna " + std::to_string(i));
            d.exact(i, k) = {re, im};
        }
    }
    return d;
}

} // namespace xlzf
