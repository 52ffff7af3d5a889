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

#include <cstdint>

#include "sen/pointcloud/pointcloud.hpp"

namespace sen::pc {

enum class Axis { x, y, z };

/// Adds clamp(N(0, sigma^2), -clip, clip) to every coordinate.
PointCloud jitter(const PointCloud& cloud, double sigma, double clip, std::uint64_t seed);

/// Right-handed rotation about `axis` through the origin, counterclockwise
/// seen from the positive axis. Multiples of 90 degrees are exact.
PointCloud align_rotate(const PointCloud& cloud, Axis axis, double degrees);

/// Centers on the centroid, then scales the farthest point to norm 1
/// (scaling skipped when that norm is <= 1e-12).
PointCloud normalize_unit_sphere(const PointCloud& cloud);

}  // namespace sen::pc
