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

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "xlzf/errors.hpp"

namespace xlzf
{

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// Numerical tolerances shared by the precoders.
/// rank_rtol: singular values below rank_rtol * sigma_max are treated as zero.
/// residual_tol: relative threshold for "numerically zero" projections and cancellation checks.
struct ToleranceParams
{
    double rank_rtol = 1e-12;
    double residual_tol = 1e-9;

    void validate() const
    {
        if (!(rank_rtol > 0.0 && rank_rtol < 1.0))
            throw InvalidArgument("ToleranceParams: rank_rtol must lie in (0, 1)");
        if (!(residual_tol > 0.0 && residual_tol < 1.0))
            throw InvalidArgument("ToleranceParams: residual_tol must lie in (0, 1)");
    }
};

/// Moore-Penrose pseudo-inverse via thin SVD.
/// A K x M input gives an M x K result. Empty inputs are legal: 0 x M maps to M x 0.
/// Rank deficiency is handled by truncating singular values below rank_rtol * sigma_max.
inline cmat pseudo_inverse(const cmat &a, const ToleranceParams &tol = {})
{
    tol.validate();
    if (a.rows() == 0 || a.cols() == 0)
        return cmat::Zero(a.cols(), a.rows());
    if (!a.allFinite())
        throw InvalidArgument("pseudo_inverse: matrix has non-finite entries");

    Eigen::JacobiSVD<cmat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    if (sigma_max == 0.0)
        return cmat::Zero(a.cols(), a.rows());

    const double cutoff = tol.rank_rtol * sigma_max;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff)
        ++rank;

    const cmat &u = svd.matrixU();
    const cmat &v = svd.matrixV();
    Eigen::VectorXd inv_sv = sv.head(rank).cwiseInverse();
    return v.leftCols(rank) * inv_sv.asDiagonal() * u.leftCols(rank).adjoint();
}

/// Orthogonal projector onto the row space of H~ (as column vectors), P = H~^+ H~.
/// K = 0 yields the M x M zero matrix.
inline cmat rowspace_projector(const cmat &h_tilde, const ToleranceParams &tol = {})
{
    const Eigen::Index m = h_tilde.cols();
    if (h_tilde.rows() == 0)
        return cmat::Zero(m, m);
    return pseudo_inverse(h_tilde, tol) * h_tilde;
}

/// (I_M - H~^+ H~) h. The projector is formed explicitly.
inline cvec nullspace_project(const cmat &h_tilde, const cvec &h, const ToleranceParams &tol = {})
{
    if (h_tilde.cols() != h.size())
        throw InvalidArgument("nullspace_project: H~ has " + std::to_string(h_tilde.cols()) +
                              " columns but h has length " + std::to_string(h.size()));
    if (h_tilde.rows() == 0)
        return h;
    const cmat p = rowspace_projector(h_tilde, tol);
    return h - p * h;
}

/// Kronecker product of two vectors; entry i*B + j is a_i * b_j.
/// kron(h_V, h_H) therefore follows the channel stacking m + n*M_H.
inline cvec kron(const cvec &a, const cvec &b)
{
    cvec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline cmat kron(const cmat &a, const cmat &b)
{
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Stacks the conjugate-transposed columns of `columns` listed in `pick` into a K x N matrix,
/// i.e. the interference matrix [h_1, ..., h_K]^H.
template <class IndexRange>
cmat hermitian_rows(const cmat &columns, const IndexRange &pick)
{
    std::size_t k = 0;
    for ([[maybe_unused]] auto idx : pick)
        ++k;
    cmat out(static_cast<Eigen::Index>(k), columns.rows());
    Eigen::Index r = 0;
    for (auto idx : pick)
        out.row(r++) = columns.col(static_cast<Eigen::Index>(idx)).adjoint();
    return out;
}

} // namespace xlzf
