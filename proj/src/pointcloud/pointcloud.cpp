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

#include "sen/pointcloud/pointcloud.hpp"

#include <cmath>
#include <string>

#include "sen/common/error.hpp"

namespace sen::pc {

PointCloud::PointCloud(std::vector<double> xyz) : xyz_(std::move(xyz)) {
    if (xyz_.empty() || xyz_.size() % 3 != 0)
        throw InvalidArgument("PointCloud: coordinate count " + std::to_string(xyz_.size()) +
                              " is not a positive multiple of 3");
    for (double v : xyz_)
        if (!std::isfinite(v)) throw InvalidArgument("PointCloud: non-finite coordinate");
}

PointCloud::PointCloud(std::span<const Point> points) {
    std::vector<double> xyz;
    xyz.reserve(points.size() * 3);
    for (const auto& p : points) xyz.insert(xyz.end(), p.begin(), p.end());
    *this = PointCloud(std::move(xyz));
}

PointCloud PointCloud::from_tensor(const ad::Tensor& t) {
    if (t.rank() != 2 || t.dim(1) != 3) throw ShapeError("PointCloud::from_tensor", t.shape(), {0, 3});
    return PointCloud(std::vector<double>(t.data().begin(), t.data().end()));
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
    std::vector<double> xyz;
    xyz.reserve(indices.size() * 3);
    for (auto i : indices) {
        if (i >= size()) throw InvalidArgument("PointCloud::subset: index out of range");
        xyz.insert(xyz.end(), xyz_.begin() + static_cast<std::ptrdiff_t>(3 * i),
                   xyz_.begin() + static_cast<std::ptrdiff_t>(3 * i + 3));
    }
    return PointCloud(std::move(xyz));
}

ad::Tensor PointCloud::to_tensor() const {
    require_non_empty(*this, "PointCloud::to_tensor");
    return ad::Tensor({size(), 3}, xyz_);
}

void require_non_empty(const PointCloud& cloud, const char* op) {
    if (cloud.empty()) throw InvalidArgument(std::string(op) + ": empty point cloud");
}

ad::Tensor stack_clouds(std::span<const PointCloud> clouds) {
    if (clouds.empty()) throw InvalidArgument("stack_clouds: no clouds");
    const std::size_t m = clouds[0].size();
    std::vector<double> xyz;
    xyz.reserve(clouds.size() * m * 3);
    for (const auto& c : clouds) {
        require_non_empty(c, "stack_clouds");
        if (c.size() != m) throw ShapeError("stack_clouds", {m, 3}, {c.size(), 3}, "clouds differ in size");
        xyz.insert(xyz.end(), c.xyz().begin(), c.xyz().end());
    }
    return ad::Tensor({clouds.size() * m, 3}, std::move(xyz));
}

}  // namespace sen::pc
