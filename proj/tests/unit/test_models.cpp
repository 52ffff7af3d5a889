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

#include "sen/autodiff/gradcheck.hpp"
#include "sen/autodiff/ops.hpp"
#include "sen/common/error.hpp"
#include "sen/mean_teacher/ema.hpp"
#include "sen/models/network.hpp"
#include "sen/pointcloud/chamfer.hpp"
#include "support.hpp"

namespace sen::model {
namespace {

using testing::random_cloud;
using testing::random_tensor;

void randomize(ModelParams& params, const std::string& name, Rng& rng, double lo, double hi) {
    for (auto& v : params.at(name).value.mutable_data()) v = rng.uniform(lo, hi);
}

// Per-point, per-edge loop: max_j leaky(scale * (h_i Wc + (h_j - h_i) We) + shift).
std::vector<double> edgeconv_oracle(const ad::Tensor& h, const BatchGraph& g, ModelParams& params,
                                    const EdgeConvWeights& w) {
    const auto& wc = params.at(w.w_center).value;
    const auto& we = params.at(w.w_edge).value;
    const auto& scale = params.at(w.scale).value;
    const auto& shift = params.at(w.shift).value;
    const std::size_t d = h.dim(1), out = wc.dim(1);
    std::vector<double> result(g.rows * out, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < g.rows; ++i) {
        for (std::size_t t = 0; t < g.k; ++t) {
            const std::size_t j = g.indices[i * g.k + t];
            for (std::size_t c = 0; c < out; ++c) {
                double v = 0.0;
                for (std::size_t r = 0; r < d; ++r) {
                    const double hi = h[i * d + r];
                    const double hj = h[j * d + r];
                    v += hi * wc[r * out + c] + (hj - hi) * we[r * out + c];
                }
                double y = scale[c] * v + shift[c];
                y = y > 0.0 ? y : ad::kLeakySlope * y;
                result[i * out + c] = std::max(result[i * out + c], y);
            }
        }
    }
    return result;
}

TEST(EdgeConv, MatchesLoopOracle) {
    Rng rng(20);
    for (int trial = 0; trial < 10; ++trial) {
        ModelParams params(Arch::tiny(), 100 + trial);
        const auto w = EdgeConvWeights::layer(2);
        randomize(params, w.scale, rng, -1.5, 1.5);
        randomize(params, w.shift, rng, -0.5, 0.5);
        const ad::Tensor h = random_tensor({8, 8}, rng);
        const BatchGraph g = batch_knn(h, 1, 3);
        const ad::Tensor out = edgeconv_layer(h, g, params, w);
        const auto expected = edgeconv_oracle(h, g, params, w);
        ASSERT_EQ(out.numel(), expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(out[i], expected[i], 1e-12) << i;
    }
}

TEST(EdgeConv, IdenticalInputsGiveIdenticalRows) {
    ModelParams params(Arch::tiny(), 1);
    const std::vector<double> row{0.3, -0.2, 0.9};
    std::vector<double> data;
    for (int i = 0; i < 6; ++i) data.insert(data.end(), row.begin(), row.end());
    const ad::Tensor h({6, 3}, data);
    const ad::Tensor out = edgeconv_layer(h, batch_knn(h, 1, 2), params, EdgeConvWeights::layer(1));
    const std::size_t w = out.dim(1);
    for (std::size_t i = 1; i < 6; ++i)
        for (std::size_t c = 0; c < w; ++c) EXPECT_EQ(out[i * w + c], out[c]);
}

TEST(EdgeConv, TwoPointSwapIsEquivariant) {
    ModelParams params(Arch::tiny(), 2);
    const ad::Tensor h({2, 3}, {0.1, 0.2, 0.3, -0.4, 0.5, 0.6});
    const ad::Tensor swapped({2, 3}, {-0.4, 0.5, 0.6, 0.1, 0.2, 0.3});
    const auto w = EdgeConvWeights::layer(1);
    const ad::Tensor a = edgeconv_layer(h, batch_knn(h, 1, 1), params, w);
    const ad::Tensor b = edgeconv_layer(swapped, batch_knn(swapped, 1, 1), params, w);
    const std::size_t out = a.dim(1);
    for (std::size_t c = 0; c < out; ++c) {
        EXPECT_EQ(a[c], b[out + c]);
        EXPECT_EQ(a[out + c], b[c]);
    }
}

TEST(EdgeConv, RejectsForeignGraph) {
    ModelParams params(Arch::tiny(), 3);
    Rng rng(3);
    const ad::Tensor h = random_tensor({6, 3}, rng);
    const ad::Tensor other = random_tensor({5, 3}, rng);
    EXPECT_THROW(edgeconv_layer(h, batch_knn(other, 1, 2), params, EdgeConvWeights::layer(1)), ShapeError);
}

TEST(BatchKnn, StaysWithinEachSample) {
    Rng rng(21);
    const ad::Tensor x = random_tensor({3 * 10, 3}, rng);
    const BatchGraph g = batch_knn(x, 3, 4);
    for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(g.indices[i * 4 + t] / 10, i / 10);
}

TEST(Encode, GlobalFeatureIsPermutationInvariant) {
    Rng rng(22);
    ModelParams params(Arch::desk(Task::classification, 6), 4);
    const pc::PointCloud c = random_cloud(64, rng);
    const auto perm = rng.permutation(64);
    const Encoding a = encode(c, params, EncodeMode::global);
    const Encoding b = encode(c.subset(perm), params, EncodeMode::global);
    ASSERT_EQ(a.global.shape(), (ad::Shape{1, 128}));
    for (std::size_t i = 0; i < a.global.numel(); ++i) EXPECT_NEAR(a.global[i], b.global[i], 1e-12);
}

TEST(Encode, PerPointFeaturesAreEquivariant) {
    Rng rng(23);
    ModelParams params(Arch::desk(Task::segmentation, 3), 5);
    const pc::PointCloud c = random_cloud(64, rng);
    const auto perm = rng.permutation(64);
    const Encoding a = encode(c, params, EncodeMode::per_point);
    const Encoding b = encode(c.subset(perm), params, EncodeMode::per_point);
    const std::size_t f = params.arch().point_width;
    ASSERT_EQ(a.per_point.shape(), (ad::Shape{64, f}));
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t c2 = 0; c2 < f; ++c2) EXPECT_NEAR(b.per_point[i * f + c2], a.per_point[perm[i] * f + c2], 1e-12);
    const ad::Tensor la = segment(a.per_point, params), lb = segment(b.per_point, params);
    ASSERT_EQ(la.shape(), (ad::Shape{64, 3}));
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(lb[i * 3 + k], la[perm[i] * 3 + k], 1e-12);
}

TEST(Encode, BatchedEqualsOneByOne) {
    Rng rng(24);
    ModelParams params(Arch::desk(Task::classification, 6), 6);
    const pc::PointCloud c1 = random_cloud(64, rng), c2 = random_cloud(64, rng);
    const pc::PointCloud both[] = {c1, c2};
    const Encoding batched = encode(pc::stack_clouds(both), 2, params, EncodeMode::global);
    const Encoding e2 = encode(c2, params, EncodeMode::global);
    for (std::size_t i = 0; i < 128; ++i) EXPECT_EQ(batched.global[128 + i], e2.global[i]);
    EXPECT_THROW(encode(pc::stack_clouds(both), 3, params, EncodeMode::global), ShapeError);
    EXPECT_THROW(encode(c1, params, EncodeMode::per_point), InvalidArgument);
}

TEST(Classify, ZeroWeightsGiveUniformProbabilities) {
    Rng rng(25);
    ModelParams params(Arch::desk(Task::classification, 6), 7);
    for (const char* name : {"classifier.fc2.w", "classifier.fc2.b"})
        for (auto& v : params.at(name).value.mutable_data()) v = 0.0;
    const ad::Tensor logits = classify(encode(random_cloud(64, rng), params, EncodeMode::global).global, params);
    ASSERT_EQ(logits.shape(), (ad::Shape{1, 6}));
    const ad::Tensor p = ad::softmax_rows(logits);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(p[i], 1.0 / 6.0, 1e-15);
}

TEST(Classify, ArgmaxIgnoresConstantShift) {
    const ad::Tensor logits({2, 3}, {0.1, 0.7, -0.2, 2.0, 1.0, 3.0});
    ad::Tensor shifted = logits;
    for (auto& v : shifted.mutable_data()) v += 5.0;
    EXPECT_EQ(argmax_rows(logits), argmax_rows(shifted));
    EXPECT_EQ(argmax_rows(logits), (std::vector<std::size_t>{1, 2}));
}

TEST(Segment, IdenticalFeaturesGiveIdenticalRows) {
    Rng rng(26);
    ModelParams params(Arch::desk(Task::segmentation, 3), 8);
    const ad::Tensor one = random_tensor({1, params.arch().point_width}, rng);
    const ad::Tensor rows = ad::broadcast_rows(one, 4);
    const ad::Tensor logits = segment(rows, params);
    for (std::size_t i = 1; i < 4; ++i)
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(logits[i * 3 + k], logits[k]);
}

TEST(Decode, ShapeGridAndZeroOutputLayer) {
    Rng rng(27);
    ModelParams params(Arch::desk(Task::classification, 6), 9);
    const ad::Tensor z = random_tensor({2, 128}, rng);
    EXPECT_EQ(decode(z, params).shape(), (ad::Shape{128, 3}));

    const ad::Tensor grid = folding_grid(params.arch());
    ASSERT_EQ(grid.shape(), (ad::Shape{64, 2}));
    EXPECT_EQ(*std::min_element(grid.data().begin(), grid.data().end()), -0.5);
    EXPECT_EQ(*std::max_element(grid.data().begin(), grid.data().end()), 0.5);

    const std::string last = "decoder.fc" + std::to_string(params.arch().decoder_widths.size() + 1) + ".";
    for (const auto& name : {last + "w", last + "b"})
        for (auto& v : params.at(name).value.mutable_data()) v = 0.0;
    const ad::Tensor out = decode(ad::Tensor({1, 128}, testing::random_values(128, rng)), params);
    for (double v : out.data()) EXPECT_EQ(v, 0.0);
    const pc::PointCloud target = random_cloud(64, rng);
    double sum = 0.0, min_n = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 64; ++i) {
        const double n = pc::squared_distance(target.point(i), {0, 0, 0});
        sum += n;
        min_n = std::min(min_n, n);
    }
    EXPECT_NEAR(pc::chamfer_distance(pc::PointCloud::from_tensor(out), target), sum + 64 * min_n, 1e-12);
}

TEST(Decode, ChamferGradientMatchesFiniteDifferences) {
    Rng rng(28);
    ModelParams params(Arch::tiny(), 10);
    const ad::Tensor z = random_tensor({1, 16}, rng);
    const ad::Tensor target = random_cloud(16, rng).to_tensor();
    std::vector<ad::Parameter*> decoder;
    for (auto* p : params.parameter_ptrs())
        if (p->name.rfind("decoder.", 0) == 0) decoder.push_back(p);
    ASSERT_EQ(decoder.size(), 8U);
    const auto report =
        ad::finite_difference_check([&] { return pc::chamfer_distance(decode(z, params), target); }, decoder);
    EXPECT_GT(report.checked, 0U);
    EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(ModelParams, DeskBudgetAndLayout) {
    const ModelParams cls(Arch::desk(Task::classification, 6), 1);
    const ModelParams seg(Arch::desk(Task::segmentation, 3), 1);
    EXPECT_LT(cls.size(), 50000U);
    EXPECT_LT(seg.size(), 50000U);
    EXPECT_TRUE(cls.same_layout(ModelParams(Arch::desk(Task::classification, 6), 2)));
    EXPECT_FALSE(cls.same_layout(seg));
    EXPECT_THROW(cls.require_same_layout(seg, "test"), InvalidArgument);
    EXPECT_THROW(ModelParams(Arch::desk(Task::classification, 1), 1), InvalidArgument);
}

TEST(ModelParams, SeededInitIsDeterministicAndBounded) {
    const ModelParams a(Arch::desk(Task::classification, 6), 3);
    const ModelParams b(Arch::desk(Task::classification, 6), 3);
    const ModelParams c(Arch::desk(Task::classification, 6), 4);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.parameters().size(); ++i) {
        const auto va = a.parameters()[i].value.data();
        const auto vb = b.parameters()[i].value.data();
        const auto vc = c.parameters()[i].value.data();
        EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
        any_diff = any_diff || !std::equal(va.begin(), va.end(), vc.begin());
        for (double v : va) EXPECT_LE(std::abs(v), std::sqrt(6.0 / 3.0) + 1e-12);
    }
    EXPECT_TRUE(any_diff);
}

TEST(ModelParams, EqualParametersGiveEqualOutputs) {
    Rng rng(29);
    ModelParams student(Arch::desk(Task::classification, 6), 11);
    ModelParams teacher = mt::init_teacher(student);
    const pc::PointCloud c = random_cloud(64, rng);
    const ad::Tensor a = classify(encode(c, student, EncodeMode::global).global, student);
    const ad::Tensor b = classify(encode(c, teacher, EncodeMode::global).global, teacher);
    for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a[i], b[i]);
}

}  // namespace
}  // namespace sen::model
