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

#include "sen/pointcloud/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"

namespace sen::pc {

PointCloud jitter(const PointCloud& cloud, double sigma, double clip, std::uint64_t seed) {
    require_non_empty(cloud, "jitter");
    if (sigma < 0.0 || clip <= 0.0) throw InvalidArgument("jitter: sigma must be >= 0 and clip > 0");
    Rng rng(seed);
    std::vector<double> xyz(cloud.xyz().begin(), cloud.xyz().end());
    for (auto& v : xyz) v += std::clamp(sigma * rng.normal(), -clip, clip);
    return PointCloud(std::move(xyz));
}

namespace {

void exact_sin_cos(double degrees, double& s, double& c) {
    const double turns = degrees / 90.0;
    if (std::isfinite(turns) && turns == std::round(turns)) {
        const long q = static_cast<long>(std::fmod(std::round(turns), 4.0) + 4.0) % 4;
        static constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0};
        static constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0};
        s = kSin[q];
        c = kCos[q];
        return;
    }
    const double rad = degrees * std::numbers::pi / 180.0;
    s = std::sin(rad);
    c = std::cos(rad);
}

}  // namespace

PointCloud align_rotate(const PointCloud& cloud, Axis axis, double degrees) {
    require_non_empty(cloud, "align_rotate");
    if (!std::isfinite(degrees)) throw InvalidArgument("align_rotate: angle must be finite");
    double s = 0.0, c = 1.0;
    exact_sin_cos(degrees, s, c);
    // (u, v) is the rotated coordinate plane, ordered so u -> v is CCW.
    int u = 1, v = 2;
    if (axis == Axis::y) {
        u = 2;
        v = 0;
    } else if (axis == Axis::z) {
        u = 0;
        v = 1;
    }
    std::vector<double> xyz(cloud.xyz().begin(), cloud.xyz().end());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double a = xyz[3 * i + u], b = xyz[3 * i + v];
        xyz[3 * i + u] = c * a - s * b;
        xyz[3 * i + v] = s * a + c * b;
    }
    return PointCloud(std::move(xyz));
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
    require_non_empty(cloud, "normalize_unit_sphere");
    const std::size_t m = cloud.size();
    double centroid[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i)
        for (int d = 0; d < 3; ++d) centroid[d] += cloud.xyz()[3 * i + d];
    for (auto& c : centroid) c /= static_cast<double>(m);
    std::vector<double> xyz(cloud.xyz().begin(), cloud.xyz().end());
    double max_norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double n2 = 0.0;
        for (int d = 0; d < 3; ++d) {
            xyz[3 * i + d] -= centroid[d];
            n2 += xyz[3 * i + d] * xyz[3 * i + d];
        }
        max_norm = std::max(max_norm, std::sqrt(n2));
    }
    if (max_norm > 1e-12)
        for (auto& v : xyz) v /= max_norm;
    return PointCloud(std::move(xyz));
}

}  // namespace sen::pc
