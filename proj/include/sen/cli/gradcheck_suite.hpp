// Copyright (c) 2026 The sen3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sen/autodiff/gradcheck.hpp"

namespace sen::cli {

struct SuiteEntry {
    std::string name;
    std::size_t cases = 0;
    ad::GradCheckReport report;  // merged over cases
};

/// `cases` random shape/value draws for every autodiff primitive, each
/// checked through the projection sum(op(x) * w) with a fixed random w.
std::vector<SuiteEntry> gradcheck_primitives(std::uint64_t seed, std::size_t cases = 50,
                                             const ad::GradCheckOptions& options = {});

/// Full joint loss on the tiny model: classification with hard and with
/// PointMixup soft labels, and segmentation.
std::vector<SuiteEntry> gradcheck_tiny_model(std::uint64_t seed, const ad::GradCheckOptions& options = {});

}  // namespace sen::cli
