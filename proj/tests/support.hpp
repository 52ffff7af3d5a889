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
#include <vector>

#include "sen/autodiff/tensor.hpp"
#include "sen/common/rng.hpp"
#include "sen/pointcloud/pointcloud.hpp"

namespace sen::testing {

inline std::vector<double> random_values(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline pc::PointCloud random_cloud(std::size_t m, Rng& rng) { return pc::PointCloud(random_values(3 * m, rng)); }

inline ad::Tensor random_tensor(ad::Shape shape, Rng& rng) {
    const std::size_t n = ad::numel(shape);
    return ad::Tensor(std::move(shape), random_values(n, rng));
}

}  // namespace sen::testing
