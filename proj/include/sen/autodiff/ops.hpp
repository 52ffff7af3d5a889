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
#include <string_view>
#include <vector>

#include "sen/autodiff/tensor.hpp"

namespace sen::ad {

inline constexpr double kLeakySlope = 0.2;

// Differentiable primitives. Each records a tape node when an input is
// tracked on the active tape. Shape violations throw sen::ShapeError.

/// (n x k) * (k x m).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scalar_mul(const Tensor& a, double c);
/// Subgradient at 0 is 0.
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope = kLeakySlope);
/// Concatenates along the last axis; leading dimensions must agree.
Tensor concat_last_axis(std::span<const Tensor> parts);
Tensor concat_last_axis(const Tensor& a, const Tensor& b);
/// Max over `axis` (axis removed). Ties go to the lowest index, which
/// receives the whole gradient.
Tensor reduce_max(const Tensor& a, std::size_t axis);
Tensor reduce_mean(const Tensor& a, std::size_t axis);
/// Sum of all entries, rank-0 result.
Tensor reduce_sum(const Tensor& a);
Tensor square(const Tensor& a);
/// Row-wise log-softmax of a 2-D tensor, max-shifted.
Tensor log_softmax(const Tensor& a);
/// Rows (first-axis slices) of `a` picked by `rows`; repeats allowed.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);
/// Repeats a single row (shape [F] or [1, F, ...]) `count` times.
Tensor broadcast_rows(const Tensor& a, std::size_t count);
/// Same data, new shape with identical element count.
Tensor reshape(const Tensor& a, Shape shape);

enum class OpKind {
    matmul,
    add,
    sub,
    mul_elementwise,
    scalar_mul,
    relu,
    leaky_relu,
    concat_last_axis,
    reduce_max_over_axis,
    reduce_mean_over_axis,
    reduce_sum,
    square,
    log_softmax,
    gather_rows,
    broadcast_rows,
    reshape,
};

inline constexpr OpKind kAllOps[] = {
    OpKind::matmul,          OpKind::add,
    OpKind::sub,             OpKind::mul_elementwise,
    OpKind::scalar_mul,      OpKind::relu,
    OpKind::leaky_relu,      OpKind::concat_last_axis,
    OpKind::reduce_max_over_axis, OpKind::reduce_mean_over_axis,
    OpKind::reduce_sum,      OpKind::square,
    OpKind::log_softmax,     OpKind::gather_rows,
    OpKind::broadcast_rows,  OpKind::reshape,
};

/// Non-tensor operands of the ops that take them.
struct OpArgs {
    double scalar = 1.0;               // scalar_mul
    double slope = kLeakySlope;        // leaky_relu
    std::size_t axis = 0;              // reduce_*_over_axis
    std::vector<std::size_t> indices;  // gather_rows
    std::size_t count = 1;             // broadcast_rows
    Shape shape;                       // reshape
};

std::string_view op_name(OpKind kind);
std::size_t op_arity(OpKind kind);

/// Uniform entry point over all primitives.
Tensor apply_primitive(OpKind kind, std::span<const Tensor> inputs, const OpArgs& args = {});

/// Row-wise softmax probabilities (not recorded).
Tensor softmax_rows(const Tensor& logits);

}  // namespace sen::ad
