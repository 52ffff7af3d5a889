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

#include "sen/pointcloud/pointcloud.hpp"

namespace sen::synth {

struct DomainProfile {
    double noise_sigma = 0.0;
    // Occlusion and density bias share a random sensor direction u.
    /// Fraction of points removed behind a half-space facing away from u.
    double occlusion = 0.0;
    /// Survival probability ((1 + p.u) / 2)^exponent.
    double density_exponent = 0.0;
    /// Fraction of points removed uniformly at random.
    double dropout = 0.0;

    static DomainProfile clean() { return {}; }
    /// Scan-like target domain: noisy, partially occluded, unevenly sampled.
    static DomainProfile scanned();

    void validate() const;
};

/// Surviving raw indices plus the final cloud.
struct DomainResult {
    pc::PointCloud cloud;
    std::vector<std::size_t> source_indices;  // row i of `cloud` came from input row source_indices[i]
};

/// Occlude, bias density, drop out, add noise, then FPS down to m_final.
/// Throws InvalidArgument when fewer than m_final points survive.
DomainResult apply_domain(const pc::PointCloud& cloud, const DomainProfile& profile, std::size_t m_final,
                          std::uint64_t seed);

}  // namespace sen::synth
