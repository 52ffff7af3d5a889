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
#include <vector>

#include "sen/autodiff/tensor.hpp"
#include "sen/pointcloud/pointcloud.hpp"

namespace sen::pc {

/// For every row of `from` (n x 3), index of the nearest row of `to`
/// (m x 3); ties go to the lowest index.
std::vector<std::size_t> nearest_indices(std::span<const double> from, std::size_t n,
                                         std::span<const double> to, std::size_t m);

/// Two-sided squared Chamfer distance:
///   sum_a min_b |a - b|^2 + sum_b min_a |a - b|^2,
/// summed with correct rounding so point order cannot change the value.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

/// Differentiable form over (n, 3) and (m, 3) tensors. Nearest-neighbour
/// assignments are held fixed in the backward pass.
ad::Tensor chamfer_distance(const ad::Tensor& a, const ad::Tensor& b);

/// Sum over `batch` samples of chamfer_distance(a_b, b_b), where `a` is
/// (batch * n, 3) and `b` is (batch * m, 3). Recorded as one graph.
ad::Tensor chamfer_distance_batched(const ad::Tensor& a, const ad::Tensor& b, std::size_t batch);

}  // namespace sen::pc
