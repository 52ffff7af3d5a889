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

#include "sen/pointcloud/pointcloud.hpp"

namespace sen::pc {

/// Greedy farthest-point sampling. The first index is drawn uniformly from
/// `seed`; each next index maximizes the minimum squared distance to the
/// already selected set (ties: lowest unselected index).
std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

/// Same, starting from a fixed index.
std::vector<std::size_t> farthest_point_sample_from(const PointCloud& cloud, std::size_t n, std::size_t start);

/// Row i holds the k nearest other points of point i, ascending by squared
/// distance, ties by lowest index.
struct KnnGraph {
    std::size_t m = 0;
    std::size_t k = 0;
    std::vector<std::size_t> indices;  // m * k, row-major

    std::span<const std::size_t> row(std::size_t i) const { return {indices.data() + i * k, k}; }
};

KnnGraph knn_graph(const PointCloud& cloud, std::size_t k);

/// Exact kNN over m row vectors of width `dim` (points or features).
KnnGraph knn_graph(std::span<const double> rows, std::size_t m, std::size_t dim, std::size_t k);

}  // namespace sen::pc
