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

#include "sen/data_synth/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"
#include "sen/pointcloud/sampling.hpp"

namespace sen::synth {

namespace {

pc::Point random_direction(Rng& rng) {
    for (;;) {
        pc::Point v{rng.normal(), rng.normal(), rng.normal()};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n > 1e-12) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

double dot(const pc::Point& a, const pc::Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

DomainProfile DomainProfile::scanned() { return {0.04, 0.45, 2.0, 0.2}; }

void DomainProfile::validate() const {
    auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v < 1.0; };
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw InvalidArgument("domain: noise sigma must be >= 0");
    if (!unit(occlusion) || !unit(dropout)) throw InvalidArgument("domain: fractions must be in [0, 1)");
    if (occlusion + dropout >= 0.9) throw InvalidArgument("domain: occlusion + dropout must stay below 0.9");
    if (!std::isfinite(density_exponent) || density_exponent < 0.0)
        throw InvalidArgument("domain: density exponent must be >= 0");
}

DomainResult apply_domain(const pc::PointCloud& cloud, const DomainProfile& profile, std::size_t m_final,
                          std::uint64_t seed) {
    pc::require_non_empty(cloud, "apply_domain");
    profile.validate();
    if (m_final == 0) throw InvalidArgument("apply_domain: m_final must be positive");
    Rng rng(seed);
    const std::size_t m = cloud.size();

    std::vector<std::size_t> alive(m);
    std::iota(alive.begin(), alive.end(), std::size_t{0});

    // Direction towards a virtual sensor: the far side is occluded and the
    // sampling density falls off away from the sensor.
    const pc::Point u = random_direction(rng);
    if (profile.occlusion > 0.0) {
        std::vector<std::pair<double, std::size_t>> proj(m);
        for (std::size_t i = 0; i < m; ++i) proj[i] = {dot(cloud.point(i), u), i};
        std::sort(proj.begin(), proj.end());
        const auto drop = static_cast<std::size_t>(std::floor(profile.occlusion * static_cast<double>(m)));
        alive.clear();
        for (std::size_t i = drop; i < m; ++i) alive.push_back(proj[i].second);
        std::sort(alive.begin(), alive.end());
    }

    if (profile.density_exponent > 0.0) {
        std::vector<std::size_t> kept;
        for (std::size_t i : alive) {
            const double w = std::pow(std::clamp(0.5 * (1.0 + dot(cloud.point(i), u)), 0.0, 1.0),
                                      profile.density_exponent);
            if (rng.uniform() < w) kept.push_back(i);
        }
        alive.swap(kept);
    }

    if (profile.dropout > 0.0) {
        std::vector<std::size_t> kept;
        for (std::size_t i : alive)
            if (rng.uniform() >= profile.dropout) kept.push_back(i);
        alive.swap(kept);
    }

    if (alive.size() < m_final)
        throw InvalidArgument("apply_domain: only " + std::to_string(alive.size()) + " points survive, need " +
                              std::to_string(m_final));

    pc::PointCloud survivors = cloud.subset(alive);
    if (profile.noise_sigma > 0.0) {
        for (double& x : survivors.mutable_xyz()) x += profile.noise_sigma * rng.normal();
    }
    const auto picked = pc::farthest_point_sample(survivors, m_final, rng.engine()());
    DomainResult out{survivors.subset(picked), {}};
    out.source_indices.reserve(picked.size());
    for (std::size_t p : picked) out.source_indices.push_back(alive[p]);
    return out;
}

}  // namespace sen::synth
