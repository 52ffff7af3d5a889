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
#include <string_view>
#include <vector>

#include "sen/pointcloud/pointcloud.hpp"

namespace sen::synth {

enum class ShapeFamily { sphere, box, cylinder, cone, torus, plane_cross };

std::string_view family_name(ShapeFamily family);
ShapeFamily parse_family(std::string_view name);

/// Part classes shared by every family in segmentation mode.
enum Part : std::size_t { side = 0, top = 1, bottom = 2 };
inline constexpr std::size_t kNumParts = 3;

struct ShapeSpec {
    ShapeFamily family = ShapeFamily::sphere;
    /// Each dimension parameter is multiplied by U(1 - j, 1 + j) per sample.
    double scale_jitter = 0.25;
};

/// The six desk-scale classes, in label order.
std::vector<ShapeSpec> default_classes();
/// Part-labelled families for segmentation.
std::vector<ShapeSpec> default_part_shapes();

struct LabelledCloud {
    pc::PointCloud cloud;
    /// Part label of every point (always filled).
    std::vector<std::size_t> parts;
};

/// Uniform surface samples of the analytic shape, centred on its own centre
/// and scaled so the farthest point has norm 1. Deterministic per seed.
LabelledCloud generate_shape(const ShapeSpec& spec, std::size_t m_raw, std::uint64_t seed);

}  // namespace sen::synth
