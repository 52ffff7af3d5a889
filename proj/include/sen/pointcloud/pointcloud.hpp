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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sen/autodiff/tensor.hpp"

namespace sen::pc {

using Point = std::array<double, 3>;

/// M x 3 coordinates stored flat (x0, y0, z0, x1, ...). A constructed cloud
/// is non-empty with finite coordinates; the default-constructed value is
/// an empty placeholder that every operation rejects.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::vector<double> xyz);
    explicit PointCloud(std::span<const Point> points);

    /// From an (M, 3) tensor.
    static PointCloud from_tensor(const ad::Tensor& t);

    std::size_t size() const { return xyz_.size() / 3; }
    bool empty() const { return xyz_.empty(); }
    Point point(std::size_t i) const { return {xyz_[3 * i], xyz_[3 * i + 1], xyz_[3 * i + 2]}; }
    std::span<const double> xyz() const { return xyz_; }
    std::span<double> mutable_xyz() { return xyz_; }

    PointCloud subset(std::span<const std::size_t> indices) const;
    ad::Tensor to_tensor() const;

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    std::vector<double> xyz_;
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

void require_non_empty(const PointCloud& cloud, const char* op);

/// Stacks equally sized clouds into one (B*M, 3) tensor.
ad::Tensor stack_clouds(std::span<const PointCloud> clouds);

}  // namespace sen::pc
