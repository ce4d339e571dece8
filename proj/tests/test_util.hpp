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
#include <random>

#include <Eigen/Dense>

#include "xlzf/numerics.hpp"

namespace xlzf::testing
{

inline cmat random_cmat(std::mt19937_64 &rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> n(0.0, 1.0);
    cmat a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            a(i, j) = {n(rng), n(rng)};
    return a;
}

inline cvec random_cvec(std::mt19937_64 &rng, Eigen::Index n) { return random_cmat(rng, n, 1).col(0); }

inline cvec unit_phasors(std::mt19937_64 &rng, Eigen::Index n)
{
    std::uniform_real_distribution<double> ph(-3.141592653589793, 3.141592653589793);
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = std::polar(1.0, ph(rng));
    return v;
}

// Independent pseudo-inverse: complete orthogonal decomposition (rank-revealing QR based).
inline cmat pinv_oracle(const cmat &a)
{
    Eigen::CompleteOrthogonalDecomposition<cmat> cod(a);
    cod.setThreshold(1e-12);
    return cod.pseudoInverse();
}

} // namespace xlzf::testing
