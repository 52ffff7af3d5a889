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

#include "sen/pointcloud/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"

namespace sen::pc {

std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
    require_non_empty(cloud, "farthest_point_sample");
    Rng rng(seed);
    return farthest_point_sample_from(cloud, n, rng.index(cloud.size()));
}

std::vector<std::size_t> farthest_point_sample_from(const PointCloud& cloud, std::size_t n, std::size_t start) {
    require_non_empty(cloud, "farthest_point_sample");
    const std::size_t m = cloud.size();
    if (n < 1 || n > m)
        throw InvalidArgument("farthest_point_sample: requested " + std::to_string(n) + " of " +
                              std::to_string(m) + " points");
    if (start >= m) throw InvalidArgument("farthest_point_sample: start index out of range");

    std::vector<std::size_t> picked;
    picked.reserve(n);
    std::vector<char> used(m, 0);
    std::vector<double> min_d(m, std::numeric_limits<double>::infinity());
    std::size_t current = start;
    for (;;) {
        picked.push_back(current);
        used[current] = 1;
        if (picked.size() == n) break;
        const Point c = cloud.point(current);
        std::size_t best = m;
        double best_d = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            min_d[i] = std::min(min_d[i], squared_distance(cloud.point(i), c));
            if (min_d[i] > best_d) {
                best_d = min_d[i];
                best = i;
            }
        }
        current = best;
    }
    return picked;
}

KnnGraph knn_graph(const PointCloud& cloud, std::size_t k) {
    require_non_empty(cloud, "knn_graph");
    return knn_graph(cloud.xyz(), cloud.size(), 3, k);
}

KnnGraph knn_graph(std::span<const double> rows, std::size_t m, std::size_t dim, std::size_t k) {
    if (rows.size() != m * dim) throw ShapeError("knn_graph", {m, dim}, {rows.size()});
    if (k < 1 || k >= m)
        throw InvalidArgument("knn_graph: k=" + std::to_string(k) + " needs 1 <= k <= m-1 with m=" +
                              std::to_string(m));
    KnnGraph g;
    g.m = m;
    g.k = k;
    g.indices.resize(m * k);
    // (a-b)^2 == (b-a)^2 bitwise, so each pair is computed once.
    std::vector<double> dist(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = rows.data() + i * dim;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* xj = rows.data() + j * dim;
            double d = 0.0;
            for (std::size_t t = 0; t < dim; ++t) {
                const double diff = xi[t] - xj[t];
                d += diff * diff;
            }
            // NaN would break the ordering; diverged features sort last.
            if (std::isnan(d)) d = std::numeric_limits<double>::infinity();
            dist[i * m + j] = d;
            dist[j * m + i] = d;
        }
    }
    std::vector<std::size_t> cand(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double* di = dist.data() + i * m;
        std::size_t c = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) cand[c++] = j;
        // Distance first, lowest index on ties.
        const auto closer = [di](std::size_t a, std::size_t b) { return di[a] < di[b] || (di[a] == di[b] && a < b); };
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), closer);
        std::copy_n(cand.begin(), k, g.indices.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    if (ad::branch_trace::enabled())
        for (auto idx : g.indices) ad::branch_trace::mix(idx);
    return g;
}

}  // namespace sen::pc
