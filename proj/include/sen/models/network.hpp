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
#include <span>
#include <string>
#include <vector>

#include "sen/autodiff/tensor.hpp"
#include "sen/models/params.hpp"
#include "sen/pointcloud/pointcloud.hpp"
#include "sen/pointcloud/sampling.hpp"

namespace sen::model {

// All forward passes are batched: B clouds of M points are stacked into a
// (B*M, d) tensor and graph indices address rows of that stack.

enum class EncodeMode { global, per_point };

struct Encoding {
    ad::Tensor global;     // (B, F)
    ad::Tensor per_point;  // (B*M, point_width), per_point mode only
};

/// Neighbour lists for a stacked batch: row i of the (B*M) stack has its k
/// neighbours at indices[i*k .. i*k+k), all within the same sample.
struct BatchGraph {
    std::size_t rows = 0;
    std::size_t k = 0;
    std::vector<std::size_t> indices;
};

/// kNN per sample over `features` (B*M, d), exact brute force.
BatchGraph batch_knn(const ad::Tensor& features, std::size_t batch, std::size_t k);
BatchGraph to_batch_graph(const pc::KnnGraph& graph);

/// Names of one EdgeConv layer's parameters.
struct EdgeConvWeights {
    std::string w_center, w_edge, scale, shift;
    static EdgeConvWeights layer(std::size_t index);  // 1-based
};

/// out_i = max_{j in kNN(i)} leaky(scale * (concat(h_i, h_j - h_i) W) + shift)
/// with W = [w_center; w_edge].
ad::Tensor edgeconv_layer(const ad::Tensor& features, const BatchGraph& graph, ModelParams& params,
                          const EdgeConvWeights& weights);

/// `points` is (B*M, 3) with M = arch.points.
Encoding encode(const ad::Tensor& points, std::size_t batch, ModelParams& params, EncodeMode mode);
Encoding encode(const pc::PointCloud& cloud, ModelParams& params, EncodeMode mode);

/// (B, F) -> (B, C) logits.
ad::Tensor classify(const ad::Tensor& global, ModelParams& params);
/// (B*M, point_width) -> (B*M, C) logits, the same two-layer MLP on every point.
ad::Tensor segment(const ad::Tensor& per_point, ModelParams& params);
/// (B, F) -> (B*M, 3): each latent copy is concatenated with a fixed 2-D
/// grid seed and folded by the decoder MLP.
ad::Tensor decode(const ad::Tensor& global, ModelParams& params);

/// Fixed folding grid, (M, 2), uniform in [-0.5, 0.5]^2.
ad::Tensor folding_grid(const Arch& arch);

/// Predicted labels (argmax over logits rows).
std::vector<std::size_t> argmax_rows(const ad::Tensor& logits);

}  // namespace sen::model
