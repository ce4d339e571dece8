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

#include "xlzf/errors.hpp"
#include "xlzf/numerics.hpp"
#include "xlzf/geometry.hpp"
#include "xlzf/channel.hpp"
#include "xlzf/grouping.hpp"
#include "xlzf/precoders.hpp"
#include "xlzf/metrics.hpp"
#include "xlzf/harness.hpp"
#include "xlzf/config.hpp"
