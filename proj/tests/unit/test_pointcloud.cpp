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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sen/autodiff/ops.hpp"
#include "sen/common/error.hpp"
#include "sen/pointcloud/chamfer.hpp"
#include "sen/pointcloud/sampling.hpp"
#include "sen/pointcloud/transforms.hpp"
#include "support.hpp"

namespace sen::pc {
namespace {

using testing::random_cloud;

// Oracles: straightforward restatements, no shared code with the library.

std::vector<std::size_t> fps_oracle(const PointCloud& c, std::size_t n, std::size_t start) {
    std::vector<std::size_t> picked{start};
    while (picked.size() < n) {
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
            double d = std::numeric_limits<double>::infinity();
            for (auto p : picked) d = std::min(d, squared_distance(c.point(i), c.point(p)));
            if (d > best) {
                best = d;
                arg = i;
            }
        }
        picked.push_back(arg);
    }
    return picked;
}

std::vector<std::size_t> knn_oracle(const PointCloud& c, std::size_t i, std::size_t k) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return squared_distance(c.point(i), c.point(a)) < squared_distance(c.point(i), c.point(b));
    });
    others.resize(k);
    return others;
}

double chamfer_oracle(const PointCloud& a, const PointCloud& b) {
    __float128 total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, squared_distance(a.point(i), b.point(j)));
        total += best;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i) best = std::min(best, squared_distance(a.point(i), b.point(j)));
        total += best;
    }
    return static_cast<double>(total);
}

TEST(PointCloud, RejectsBadInput) {
    EXPECT_THROW(PointCloud(std::vector<double>{1, 2}), InvalidArgument);
    EXPECT_THROW(PointCloud(std::vector<double>{}), InvalidArgument);
    EXPECT_THROW(PointCloud(std::vector<double>{1, 2, std::nan("")}), InvalidArgument);
    EXPECT_THROW(normalize_unit_sphere(PointCloud()), InvalidArgument);
}

TEST(PointCloud, TensorRoundTrip) {
    Rng rng(1);
    const PointCloud c = random_cloud(7, rng);
    EXPECT_EQ(PointCloud::from_tensor(c.to_tensor()), c);
    const std::vector<std::size_t> idx{4, 0};
    const PointCloud s = c.subset(idx);
    EXPECT_EQ(s.point(0), c.point(4));
    EXPECT_EQ(s.point(1), c.point(0));
}

TEST(Fps, MatchesBruteForceOracle) {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 10 + rng.index(60);
        const PointCloud c = random_cloud(m, rng);
        const std::size_t n = 1 + rng.index(m);
        const std::size_t start = rng.index(m);
        EXPECT_EQ(farthest_point_sample_from(c, n, start), fps_oracle(c, n, start));
    }
}

TEST(Fps, TiesGoToLowestIndexAndIndicesAreDistinct) {
    // Unit square corners: from 0 the farthest is the diagonal (3), then 1 and 2 tie.
    const std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    const PointCloud c{std::span<const Point>(pts)};
    EXPECT_EQ(farthest_point_sample_from(c, 4, 0), (std::vector<std::size_t>{0, 3, 1, 2}));
    EXPECT_THROW(farthest_point_sample_from(c, 5, 0), InvalidArgument);
    const auto seeded = farthest_point_sample(c, 4, 11);
    EXPECT_EQ(seeded, farthest_point_sample(c, 4, 11));
}

TEST(Knn, MatchesBruteForceOracle) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 5 + rng.index(60);
        const PointCloud c = random_cloud(m, rng);
        const std::size_t k = 1 + rng.index(std::min<std::size_t>(m - 1, 16));
        const KnnGraph g = knn_graph(c, k);
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = g.row(i);
            EXPECT_EQ(std::vector<std::size_t>(row.begin(), row.end()), knn_oracle(c, i, k));
        }
    }
}

TEST(Knn, TiesByLowestIndexAndRangeChecks) {
    const std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 2, 0}};
    const PointCloud c{std::span<const Point>(pts)};
    EXPECT_EQ(knn_graph(c, 2).row(0)[0], 1U);
    EXPECT_EQ(knn_graph(c, 2).row(0)[1], 2U);
    EXPECT_THROW(knn_graph(c, 4), InvalidArgument);
    EXPECT_THROW(knn_graph(c, 0), InvalidArgument);
}

TEST(Chamfer, MatchesDoubleLoopOracleExactly) {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const PointCloud a = random_cloud(1 + rng.index(32), rng);
        const PointCloud b = random_cloud(1 + rng.index(32), rng);
        const double d = chamfer_distance(a, b);
        EXPECT_EQ(d, chamfer_oracle(a, b));
        EXPECT_EQ(d, chamfer_distance(b, a));
    }
}

TEST(Chamfer, PermutationInvariantAndZeroOnlyForEqualSets) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const PointCloud a = random_cloud(2 + rng.index(31), rng);
        const PointCloud b = random_cloud(2 + rng.index(31), rng);
        const auto perm = rng.permutation(a.size());
        const PointCloud pa = a.subset(perm);
        EXPECT_EQ(chamfer_distance(pa, b), chamfer_distance(a, b));
        EXPECT_EQ(chamfer_distance(a, pa), 0.0);
        EXPECT_GT(chamfer_distance(a, b), 0.0);
    }
}

TEST(Chamfer, TensorFormAgreesAndBatches) {
    Rng rng(6);
    const PointCloud a1 = random_cloud(8, rng), b1 = random_cloud(8, rng);
    const PointCloud a2 = random_cloud(8, rng), b2 = random_cloud(8, rng);
    const double single = chamfer_distance(a1.to_tensor(), b1.to_tensor()).item();
    EXPECT_NEAR(single, chamfer_distance(a1, b1), 1e-12);
    const PointCloud as[] = {a1, a2};
    const PointCloud bs[] = {b1, b2};
    const double batched = chamfer_distance_batched(stack_clouds(as), stack_clouds(bs), 2).item();
    EXPECT_NEAR(batched, chamfer_distance(a1, b1) + chamfer_distance(a2, b2), 1e-12);
}

TEST(Chamfer, SmallExample) {
    const std::vector<Point> pa{{0, 0, 0}, {1, 0, 0}};
    const std::vector<Point> pb{{0, 0, 0}};
    EXPECT_EQ(chamfer_distance(PointCloud{std::span<const Point>(pa)}, PointCloud{std::span<const Point>(pb)}), 1.0);
}

TEST(Transforms, JitterIsClippedAndSeeded) {
    Rng rng(7);
    const PointCloud c = random_cloud(200, rng);
    const PointCloud j = jitter(c, 0.5, 0.02, 9);
    for (std::size_t i = 0; i < c.xyz().size(); ++i) EXPECT_LE(std::abs(j.xyz()[i] - c.xyz()[i]), 0.02 + 1e-15);
    EXPECT_EQ(j, jitter(c, 0.5, 0.02, 9));
    EXPECT_NE(j, jitter(c, 0.5, 0.02, 10));
    EXPECT_EQ(jitter(c, 0.0, 0.02, 1), c);
}

TEST(Transforms, QuarterTurnsAreExact) {
    const std::vector<Point> pts{{1, 2, 3}};
    const PointCloud c{std::span<const Point>(pts)};
    EXPECT_EQ(align_rotate(c, Axis::x, 90).point(0), (Point{1, -3, 2}));
    EXPECT_EQ(align_rotate(c, Axis::z, 90).point(0), (Point{-2, 1, 3}));
    EXPECT_EQ(align_rotate(c, Axis::y, -90).point(0), (Point{-3, 2, 1}));
    EXPECT_EQ(align_rotate(align_rotate(c, Axis::x, 90), Axis::x, 270), c);
}

TEST(Transforms, NormalizeUnitSphere) {
    Rng rng(8);
    std::vector<double> xyz = testing::random_values(3 * 50, rng, 3.0, 9.0);
    const PointCloud n = normalize_unit_sphere(PointCloud(xyz));
    double cx = 0, max_norm = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const Point p = n.point(i);
        cx += p[0];
        max_norm = std::max(max_norm, std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    }
    EXPECT_NEAR(cx / 50.0, 0.0, 1e-12);
    EXPECT_NEAR(max_norm, 1.0, 1e-12);
    const std::vector<Point> same{{2, 2, 2}, {2, 2, 2}};
    EXPECT_EQ(normalize_unit_sphere(PointCloud{std::span<const Point>(same)}).point(0), (Point{0, 0, 0}));
}

}  // namespace
}  // namespace sen::pc
