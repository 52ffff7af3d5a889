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
#include <span>
#include <vector>

#include "sen/common/rng.hpp"
#include "sen/pointcloud/pointcloud.hpp"

namespace sen::aug {

/// Result of mixing two M-point clouds. `soft_label` is a convex
/// combination of two one-hot vectors.
struct MixedSample {
    pc::PointCloud cloud;
    std::vector<double> soft_label;
    double gamma = 0.0;
    std::size_t from_first = 0;
    std::size_t from_second = 0;
};

/// Draw from Beta(alpha, alpha).
double sample_gamma(double alpha, std::uint64_t seed);
double sample_gamma(double alpha, Rng& rng);

/// Point counts taken from (first, second) cloud: round((1 - gamma) * m) and
/// the complement, so the total is exactly m.
std::pair<std::size_t, std::size_t> mix_counts(double gamma, std::size_t m);

/// FPS((1-gamma) M, xi) u FPS(gamma M, xj) with soft label
/// (1-gamma) onehot(yi) + gamma onehot(yj).
MixedSample pointmixup(const pc::PointCloud& xi, std::size_t yi, const pc::PointCloud& xj, std::size_t yj,
                       double gamma, std::size_t num_classes, std::uint64_t seed);

/// Segmentation variant: every kept point keeps its own part label.
struct MixedParts {
    pc::PointCloud cloud;
    std::vector<std::size_t> labels;
    double gamma = 0.0;
};

MixedParts pointmixup_parts(const pc::PointCloud& xi, std::span<const std::size_t> labels_i,
                            const pc::PointCloud& xj, std::span<const std::size_t> labels_j, double gamma,
                            std::uint64_t seed);

}  // namespace sen::aug
