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

#include "sen/models/network.hpp"

#include "sen/autodiff/ops.hpp"
#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"

namespace sen::model {

namespace {

ad::Tensor linear(const ad::Tensor& x, ModelParams& params, const std::string& prefix) {
    const ad::Tensor y = ad::matmul(x, params.use(prefix + "w"));
    return ad::add(y, ad::broadcast_rows(params.use(prefix + "b"), x.dim(0)));
}

ad::Tensor affine(const ad::Tensor& x, ModelParams& params, const std::string& scale, const std::string& shift) {
    const std::size_t rows = x.dim(0);
    return ad::add(ad::mul(x, ad::broadcast_rows(params.use(scale), rows)),
                   ad::broadcast_rows(params.use(shift), rows));
}

// Row r of the result selects sample r / m: spreads (B, F) to (B*M, F).
std::vector<std::size_t> repeat_rows(std::size_t batch, std::size_t m) {
    std::vector<std::size_t> idx(batch * m);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < m; ++i) idx[b * m + i] = b;
    return idx;
}

}  // namespace

BatchGraph batch_knn(const ad::Tensor& features, std::size_t batch, std::size_t k) {
    if (features.rank() != 2 || batch == 0 || features.dim(0) % batch != 0)
        throw ShapeError("batch_knn", features.shape(), {batch}, "rows not divisible by batch");
    const std::size_t m = features.dim(0) / batch;
    const std::size_t d = features.dim(1);
    BatchGraph g;
    g.rows = features.dim(0);
    g.k = k;
    g.indices.resize(g.rows * k);
    for (std::size_t b = 0; b < batch; ++b) {
        const auto local = pc::knn_graph(features.data().subspan(b * m * d, m * d), m, d, k);
        for (std::size_t t = 0; t < m * k; ++t) g.indices[b * m * k + t] = b * m + local.indices[t];
    }
    return g;
}

BatchGraph to_batch_graph(const pc::KnnGraph& graph) { return {graph.m, graph.k, graph.indices}; }

EdgeConvWeights EdgeConvWeights::layer(std::size_t index) {
    const std::string p = "encoder.edgeconv" + std::to_string(index) + ".";
    return {p + "w_center", p + "w_edge", p + "scale", p + "shift"};
}

ad::Tensor edgeconv_layer(const ad::Tensor& features, const BatchGraph& graph, ModelParams& params,
                          const EdgeConvWeights& weights) {
    if (features.rank() != 2 || features.dim(0) != graph.rows)
        throw ShapeError("edgeconv_layer", features.shape(), {graph.rows}, "graph built on a different point set");
    const ad::Tensor w_center = params.use(weights.w_center);
    const ad::Tensor w_edge = params.use(weights.w_edge);
    if (w_center.dim(0) != features.dim(1))
        throw ShapeError("edgeconv_layer", features.shape(), w_center.shape(), "feature width vs weights");
    const std::size_t rows = graph.rows;
    const std::size_t k = graph.k;
    const std::size_t out = w_center.dim(1);

    // concat(h_i, h_j - h_i) W = h_i (Wc - We) + h_j We, so the MLP runs per
    // point. leaky(s x + t) is monotone in x per channel (increasing for
    // s >= 0, decreasing otherwise), so the max over edges only needs the
    // max (or min) of h_j We over the neighbourhood.
    const ad::Tensor p = ad::matmul(features, w_edge);
    const ad::Tensor q = ad::matmul(features, w_center);
    const ad::Tensor scale = params.use(weights.scale);
    std::vector<double> sign(out);
    std::uint64_t sign_bits = 0;
    for (std::size_t c = 0; c < out; ++c) {
        sign[c] = scale.data()[c] < 0.0 ? -1.0 : 1.0;
        sign_bits = sign_bits * 1099511628211ULL + (sign[c] < 0.0 ? 2 : 1);
    }
    if (ad::branch_trace::enabled()) ad::branch_trace::mix(sign_bits);
    const ad::Tensor sign_rows = ad::broadcast_rows(ad::Tensor({out}, sign), rows);
    const ad::Tensor signed_p = ad::mul(p, sign_rows);
    const ad::Tensor gathered = ad::reshape(ad::gather_rows(signed_p, graph.indices), {rows, k, out});
    const ad::Tensor extreme = ad::mul(ad::reduce_max(gathered, 1), sign_rows);
    return ad::leaky_relu(affine(ad::add(ad::sub(q, p), extreme), params, weights.scale, weights.shift));
}

Encoding encode(const ad::Tensor& points, std::size_t batch, ModelParams& params, EncodeMode mode) {
    const Arch& arch = params.arch();
    if (points.rank() != 2 || points.dim(1) != 3 || points.dim(0) != batch * arch.points)
        throw ShapeError("encode", points.shape(), {batch * arch.points, 3}, "expected stacked M-point clouds");
    const std::size_t m = arch.points;

    const BatchGraph coord_graph = batch_knn(points, batch, arch.k);
    std::vector<ad::Tensor> layers;
    ad::Tensor h = points;
    for (std::size_t l = 0; l < arch.edge_widths.size(); ++l) {
        const BatchGraph graph = (l == 0 || !arch.dynamic_graph) ? coord_graph : batch_knn(h, batch, arch.k);
        h = edgeconv_layer(h, graph, params, EdgeConvWeights::layer(l + 1));
        layers.push_back(h);
    }
    const ad::Tensor local = layers.size() == 1 ? layers[0] : ad::concat_last_axis(layers);
    const ad::Tensor embedded = ad::leaky_relu(affine(ad::matmul(local, params.use("encoder.global.w")), params,
                                                      "encoder.global.scale", "encoder.global.shift"));
    Encoding enc;
    enc.global = ad::reduce_max(ad::reshape(embedded, {batch, m, arch.latent}), 1);
    if (mode == EncodeMode::per_point) {
        if (!params.contains("encoder.point.w"))
            throw InvalidArgument("encode: per_point mode needs a segmentation architecture");
        const ad::Tensor spread = ad::gather_rows(enc.global, repeat_rows(batch, m));
        const ad::Tensor joined = ad::concat_last_axis(local, spread);
        enc.per_point = ad::leaky_relu(affine(ad::matmul(joined, params.use("encoder.point.w")), params,
                                              "encoder.point.scale", "encoder.point.shift"));
    }
    return enc;
}

Encoding encode(const pc::PointCloud& cloud, ModelParams& params, EncodeMode mode) {
    return encode(cloud.to_tensor(), 1, params, mode);
}

ad::Tensor classify(const ad::Tensor& global, ModelParams& params) {
    const ad::Tensor hidden = ad::leaky_relu(linear(global, params, "classifier.fc1."));
    return linear(hidden, params, "classifier.fc2.");
}

ad::Tensor segment(const ad::Tensor& per_point, ModelParams& params) {
    const ad::Tensor hidden = ad::leaky_relu(linear(per_point, params, "segmenter.fc1."));
    return linear(hidden, params, "segmenter.fc2.");
}

ad::Tensor folding_grid(const Arch& arch) {
    const auto [rows, cols] = arch.grid_dims();
    auto coord = [](std::size_t i, std::size_t n) {
        return n == 1 ? 0.0 : -0.5 + static_cast<double>(i) / static_cast<double>(n - 1);
    };
    std::vector<double> g;
    g.reserve(arch.points * 2);
    for (std::size_t r = 0; r < rows && g.size() < arch.points * 2; ++r)
        for (std::size_t c = 0; c < cols && g.size() < arch.points * 2; ++c) {
            g.push_back(coord(r, rows));
            g.push_back(coord(c, cols));
        }
    return ad::Tensor({arch.points, 2}, std::move(g));
}

ad::Tensor decode(const ad::Tensor& global, ModelParams& params) {
    const Arch& arch = params.arch();
    if (global.rank() != 2 || global.dim(1) != arch.latent)
        throw ShapeError("decode", global.shape(), {0, arch.latent}, "expected (B, F) global features");
    const std::size_t batch = global.dim(0);
    const ad::Tensor grid = folding_grid(arch);
    std::vector<std::size_t> tile(batch * arch.points);
    for (std::size_t i = 0; i < tile.size(); ++i) tile[i] = i % arch.points;

    ad::Tensor x = ad::concat_last_axis(ad::gather_rows(global, repeat_rows(batch, arch.points)),
                                        ad::gather_rows(grid, tile));
    const std::size_t layers = arch.decoder_widths.size() + 1;
    for (std::size_t l = 0; l < layers; ++l) {
        x = linear(x, params, "decoder.fc" + std::to_string(l + 1) + ".");
        if (l + 1 < layers) x = ad::leaky_relu(x);
    }
    return x;
}

std::vector<std::size_t> argmax_rows(const ad::Tensor& logits) {
    if (logits.rank() != 2) throw ShapeError("argmax_rows", logits.shape(), {}, "expected 2-D logits");
    const std::size_t rows = logits.dim(0), cols = logits.dim(1);
    std::vector<std::size_t> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < cols; ++c)
            if (logits[r * cols + c] > logits[r * cols + best]) best = c;
        out[r] = best;
    }
    return out;
}

}  // namespace sen::model
