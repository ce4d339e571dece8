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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xlzf
{

// Bad dimensions, out-of-range indices, non-finite input.
class InvalidArgument : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A user sits on top of an antenna element (zero propagation distance).
class DegenerateGeometry : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Greedy grouping could not reach N_g^2 < M_V before the threshold covered all elevations.
class InfeasibleGrouping : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InfeasiblePartition : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A precoder projection came out numerically zero for this user.
class DegenerateUser : public std::runtime_error
{
public:
    DegenerateUser(std::size_t user, const std::string &what)
        : std::runtime_error(what + " (user " + std::to_string(user) + ")"), user_(user) {}

    std::size_t user() const noexcept { return user_; }

private:
    std::size_t user_;
};

} // namespace xlzf
