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

#include "sen/augmentation/pointmixup.hpp"

#include <cmath>
#include <string>

#include "sen/common/error.hpp"
#include "sen/pointcloud/sampling.hpp"

namespace sen::aug {

double sample_gamma(double alpha, std::uint64_t seed) {
    Rng rng(seed);
    return sample_gamma(alpha, rng);
}

double sample_gamma(double alpha, Rng& rng) {
    if (!(alpha > 0.0)) throw InvalidArgument("sample_gamma: alpha must be positive");
    return rng.beta(alpha, alpha);
}

std::pair<std::size_t, std::size_t> mix_counts(double gamma, std::size_t m) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("pointmixup: gamma must lie in [0, 1]");
    const auto first = static_cast<std::size_t>(std::round((1.0 - gamma) * static_cast<double>(m)));
    return {first, m - first};
}

namespace {

struct Selection {
    std::vector<std::size_t> first;
    std::vector<std::size_t> second;
};

Selection select(const pc::PointCloud& xi, const pc::PointCloud& xj, double gamma, std::uint64_t seed) {
    pc::require_non_empty(xi, "pointmixup");
    pc::require_non_empty(xj, "pointmixup");
    if (xi.size() != xj.size())
        throw InvalidArgument("pointmixup: cloud sizes differ (" + std::to_string(xi.size()) + " vs " +
                              std::to_string(xj.size()) + ")");
    const auto [ni, nj] = mix_counts(gamma, xi.size());
    Selection s;
    if (ni > 0) s.first = pc::farthest_point_sample(xi, ni, derive_seed(seed, 1));
    if (nj > 0) s.second = pc::farthest_point_sample(xj, nj, derive_seed(seed, 2));
    return s;
}

pc::PointCloud join(const pc::PointCloud& xi, const pc::PointCloud& xj, const Selection& s) {
    std::vector<double> xyz;
    xyz.reserve(3 * (s.first.size() + s.second.size()));
    for (auto i : s.first) xyz.insert(xyz.end(), {xi.xyz()[3 * i], xi.xyz()[3 * i + 1], xi.xyz()[3 * i + 2]});
    for (auto j : s.second) xyz.insert(xyz.end(), {xj.xyz()[3 * j], xj.xyz()[3 * j + 1], xj.xyz()[3 * j + 2]});
    return pc::PointCloud(std::move(xyz));
}

}  // namespace

MixedSample pointmixup(const pc::PointCloud& xi, std::size_t yi, const pc::PointCloud& xj, std::size_t yj,
                       double gamma, std::size_t num_classes, std::uint64_t seed) {
    if (yi >= num_classes || yj >= num_classes) throw InvalidArgument("pointmixup: label out of range");
    const Selection s = select(xi, xj, gamma, seed);
    MixedSample out;
    out.cloud = join(xi, xj, s);
    out.gamma = gamma;
    out.from_first = s.first.size();
    out.from_second = s.second.size();
    out.soft_label.assign(num_classes, 0.0);
    out.soft_label[yi] += 1.0 - gamma;
    out.soft_label[yj] += gamma;
    return out;
}

MixedParts pointmixup_parts(const pc::PointCloud& xi, std::span<const std::size_t> labels_i,
                            const pc::PointCloud& xj, std::span<const std::size_t> labels_j, double gamma,
                            std::uint64_t seed) {
    if (labels_i.size() != xi.size() || labels_j.size() != xj.size())
        throw InvalidArgument("pointmixup: part label count does not match point count");
    const Selection s = select(xi, xj, gamma, seed);
    MixedParts out;
    out.cloud = join(xi, xj, s);
    out.gamma = gamma;
    for (auto i : s.first) out.labels.push_back(labels_i[i]);
    for (auto j : s.second) out.labels.push_back(labels_j[j]);
    return out;
}

}  // namespace sen::aug
