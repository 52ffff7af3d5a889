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

#include "sen/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"

namespace sen::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

// Records a node only when some input lives on the active tape; the
// backward closure is built lazily so constant-only calls pay nothing.
template <typename MakeBackward>
Tensor finish(Shape shape, std::vector<double> data, std::span<const Tensor> inputs,
              MakeBackward&& make_backward) {
    Tape* tape = Tape::active();
    if (tape != nullptr) {
        for (const auto& in : inputs) {
            if (in.tape() == tape) return tape->record(std::move(shape), std::move(data), inputs, make_backward());
        }
    }
    return Tensor(std::move(shape), std::move(data));
}

// out = a (n x k) * b (k x m), row-major. Every element is the plain sum
// over t in order, whatever the block it lands in, so a row's result does
// not depend on its position (Eigen's kernels differ at odd sizes).
using Vec4 = double __attribute__((vector_size(32)));

inline Vec4 load4(const double* p) {
    Vec4 v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

template <std::size_t R, std::size_t V>
void gemm_block(const double* a, const double* b, double* out, std::size_t k, std::size_t m, std::size_t i,
                std::size_t j0) {
    Vec4 acc[R][V] = {};
    for (std::size_t t = 0; t < k; ++t) {
        Vec4 bv[V];
        for (std::size_t v = 0; v < V; ++v) bv[v] = load4(b + t * m + j0 + 4 * v);
        for (std::size_t r = 0; r < R; ++r) {
            const double s = a[(i + r) * k + t];
            for (std::size_t v = 0; v < V; ++v) acc[r][v] += s * bv[v];
        }
    }
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t v = 0; v < V; ++v) std::memcpy(out + (i + r) * m + j0 + 4 * v, &acc[r][v], sizeof(Vec4));
}

template <std::size_t R>
void gemm_rows(const double* a, const double* b, double* out, std::size_t k, std::size_t m, std::size_t i) {
    std::size_t j = 0;
    for (; j + 12 <= m; j += 12) gemm_block<R, 3>(a, b, out, k, m, i, j);
    for (; j + 4 <= m; j += 4) gemm_block<R, 1>(a, b, out, k, m, i, j);
    for (; j < m; ++j)
        for (std::size_t r = i; r < i + R; ++r) {
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += a[r * k + t] * b[t * m + j];
            out[r * m + j] = s;
        }
}

void gemm(const double* a, const double* b, double* out, std::size_t n, std::size_t k, std::size_t m) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) gemm_rows<4>(a, b, out, k, m, i);
    for (; i < n; ++i) gemm_rows<1>(a, b, out, k, m, i);
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError(op, a.shape(), b.shape());
}

struct AxisSplit {
    std::size_t outer = 1;
    std::size_t n = 1;
    std::size_t inner = 1;
    Shape reduced;
};

AxisSplit split_axis(const char* op, const Shape& shape, std::size_t axis) {
    if (axis >= shape.size()) throw ShapeError(op, shape, {axis}, "axis out of range");
    AxisSplit s;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i < axis) s.outer *= shape[i];
        if (i > axis) s.inner *= shape[i];
        if (i != axis) s.reduced.push_back(shape[i]);
    }
    s.n = shape[axis];
    return s;
}

void trace_signs(std::span<const double> x) {
    if (!branch_trace::enabled()) return;
    std::uint64_t word = 0;
    int bits = 0;
    for (double v : x) {
        word = (word << 1) | (v > 0.0 ? 1U : 0U);
        if (++bits == 64) {
            branch_trace::mix(word);
            word = 0;
            bits = 0;
        }
    }
    branch_trace::mix(word ^ static_cast<std::uint64_t>(bits));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) throw ShapeError("matmul", a.shape(), b.shape());
    const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
    std::vector<double> out(n * m);
    gemm(a.data().data(), b.data().data(), out.data(), n, k, m);
    const Tensor in[] = {a, b};
    return finish({n, m}, std::move(out), in, [&] {
        return [sa = a.storage(), sb = b.storage(), n, k, m](std::span<const double> g,
                                                            std::span<std::vector<double>* const> gi) {
            ConstMap gm(g.data(), n, m);
            if (gi[0]) MutMap(gi[0]->data(), n, k).noalias() += gm * ConstMap(sb->data(), k, m).transpose();
            if (gi[1]) MutMap(gi[1]->data(), k, m).noalias() += ConstMap(sa->data(), n, k).transpose() * gm;
        };
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape("add", a, b);
    std::vector<double> out(a.numel());
    const auto x = a.data(), y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    const Tensor in[] = {a, b};
    return finish(a.shape(), std::move(out), in, [] {
        return [](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (auto* buf : gi)
                if (buf)
                    for (std::size_t i = 0; i < g.size(); ++i) (*buf)[i] += g[i];
        };
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape("sub", a, b);
    std::vector<double> out(a.numel());
    const auto x = a.data(), y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
    const Tensor in[] = {a, b};
    return finish(a.shape(), std::move(out), in, [] {
        return [](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            if (gi[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += g[i];
            if (gi[1])
                for (std::size_t i = 0; i < g.size(); ++i) (*gi[1])[i] -= g[i];
        };
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape("mul_elementwise", a, b);
    std::vector<double> out(a.numel());
    const auto x = a.data(), y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
    const Tensor in[] = {a, b};
    return finish(a.shape(), std::move(out), in, [&] {
        return [sa = a.storage(), sb = b.storage()](std::span<const double> g,
                                                  std::span<std::vector<double>* const> gi) {
            if (gi[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += g[i] * (*sb)[i];
            if (gi[1])
                for (std::size_t i = 0; i < g.size(); ++i) (*gi[1])[i] += g[i] * (*sa)[i];
        };
    });
}

Tensor scalar_mul(const Tensor& a, double c) {
    std::vector<double> out(a.numel());
    const auto x = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
    const Tensor in[] = {a};
    return finish(a.shape(), std::move(out), in, [c] {
        return [c](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += c * g[i];
        };
    });
}

Tensor relu(const Tensor& a) { return leaky_relu(a, 0.0); }

Tensor leaky_relu(const Tensor& a, double slope) {
    const auto x = a.data();
    trace_signs(x);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : slope * x[i];
    const Tensor in[] = {a};
    return finish(a.shape(), std::move(out), in, [&] {
        return [sa = a.storage(), slope](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += (*sa)[i] > 0.0 ? g[i] : slope * g[i];
        };
    });
}

Tensor concat_last_axis(std::span<const Tensor> parts) {
    if (parts.empty()) throw InvalidArgument("concat_last_axis: no inputs");
    const Shape& first = parts[0].shape();
    if (first.empty()) throw ShapeError("concat_last_axis", first, {}, "rank-0 input");
    const Shape lead(first.begin(), first.end() - 1);
    std::vector<std::size_t> widths;
    std::size_t total = 0;
    for (const auto& p : parts) {
        const Shape& s = p.shape();
        if (s.size() != first.size() || !std::equal(lead.begin(), lead.end(), s.begin()))
            throw ShapeError("concat_last_axis", first, s, "leading dimensions differ");
        widths.push_back(s.back());
        total += s.back();
    }
    const std::size_t rows = numel(lead);
    std::vector<double> out(rows * total);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const auto src = parts[p].data().subspan(r * widths[p], widths[p]);
            std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(r * total + off));
            off += widths[p];
        }
    }
    Shape shape = lead;
    shape.push_back(total);
    return finish(std::move(shape), std::move(out), parts, [&] {
        return [widths, rows, total](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            std::size_t off = 0;
            for (std::size_t p = 0; p < widths.size(); ++p) {
                if (gi[p]) {
                    auto& dst = *gi[p];
                    for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t c = 0; c < widths[p]; ++c) dst[r * widths[p] + c] += g[r * total + off + c];
                }
                off += widths[p];
            }
        };
    });
}

Tensor concat_last_axis(const Tensor& a, const Tensor& b) {
    const Tensor parts[] = {a, b};
    return concat_last_axis(parts);
}

Tensor reduce_max(const Tensor& a, std::size_t axis) {
    const AxisSplit s = split_axis("reduce_max_over_axis", a.shape(), axis);
    const auto x = a.data();
    std::vector<double> out(s.outer * s.inner);
    std::vector<std::size_t> arg(out.size());
    for (std::size_t o = 0; o < s.outer; ++o) {
        double* best_v = out.data() + o * s.inner;
        std::size_t* best = arg.data() + o * s.inner;
        const double* first = x.data() + o * s.n * s.inner;
        for (std::size_t i = 0; i < s.inner; ++i) {
            best_v[i] = first[i];
            best[i] = o * s.n * s.inner + i;
        }
        // Strict comparison in ascending j keeps the lowest index on ties.
        for (std::size_t j = 1; j < s.n; ++j) {
            const std::size_t base = (o * s.n + j) * s.inner;
            const double* row = x.data() + base;
            for (std::size_t i = 0; i < s.inner; ++i) {
                if (row[i] > best_v[i]) {
                    best_v[i] = row[i];
                    best[i] = base + i;
                }
            }
        }
    }
    if (branch_trace::enabled())
        for (auto idx : arg) branch_trace::mix(idx);
    const Tensor in[] = {a};
    return finish(s.reduced, std::move(out), in, [&] {
        return [arg = std::move(arg)](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[arg[i]] += g[i];
        };
    });
}

Tensor reduce_mean(const Tensor& a, std::size_t axis) {
    const AxisSplit s = split_axis("reduce_mean_over_axis", a.shape(), axis);
    const auto x = a.data();
    std::vector<double> out(s.outer * s.inner, 0.0);
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t j = 0; j < s.n; ++j)
            for (std::size_t i = 0; i < s.inner; ++i) out[o * s.inner + i] += x[(o * s.n + j) * s.inner + i];
    const double inv = 1.0 / static_cast<double>(s.n);
    for (auto& v : out) v *= inv;
    const Tensor in[] = {a};
    return finish(s.reduced, std::move(out), in, [&] {
        return [s, inv](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            auto& dst = *gi[0];
            for (std::size_t o = 0; o < s.outer; ++o)
                for (std::size_t j = 0; j < s.n; ++j)
                    for (std::size_t i = 0; i < s.inner; ++i) dst[(o * s.n + j) * s.inner + i] += g[o * s.inner + i] * inv;
        };
    });
}

Tensor reduce_sum(const Tensor& a) {
    double total = 0.0;
    for (double v : a.data()) total += v;
    const Tensor in[] = {a};
    return finish({}, {total}, in, [] {
        return [](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (auto& v : *gi[0]) v += g[0];
        };
    });
}

Tensor square(const Tensor& a) {
    const auto x = a.data();
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * x[i];
    const Tensor in[] = {a};
    return finish(a.shape(), std::move(out), in, [&] {
        return [sa = a.storage()](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += 2.0 * (*sa)[i] * g[i];
        };
    });
}

Tensor log_softmax(const Tensor& a) {
    if (a.rank() != 2) throw ShapeError("log_softmax", a.shape(), {}, "expected batch x classes");
    const std::size_t rows = a.dim(0), cols = a.dim(1);
    const auto x = a.data();
    std::vector<double> out(a.numel());
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = x.subspan(r * cols, cols);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double v : row) z += std::exp(v - mx);
        const double lse = mx + std::log(z);
        for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = row[c] - lse;
    }
    auto saved = std::make_shared<const std::vector<double>>(out);
    const Tensor in[] = {a};
    return finish(a.shape(), std::move(out), in, [&] {
        return [saved, rows, cols](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            auto& dst = *gi[0];
            for (std::size_t r = 0; r < rows; ++r) {
                double gs = 0.0;
                for (std::size_t c = 0; c < cols; ++c) gs += g[r * cols + c];
                for (std::size_t c = 0; c < cols; ++c)
                    dst[r * cols + c] += g[r * cols + c] - std::exp((*saved)[r * cols + c]) * gs;
            }
        };
    });
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
    if (a.rank() == 0) throw ShapeError("gather_rows", a.shape(), {}, "rank-0 input");
    if (rows.empty()) throw ShapeError("gather_rows", a.shape(), {0}, "empty index list");
    const std::size_t n = a.dim(0);
    const std::size_t width = a.numel() / n;
    const auto x = a.data();
    std::vector<double> out(rows.size() * width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= n) throw ShapeError("gather_rows", a.shape(), {rows[r]}, "row index out of range");
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(rows[r] * width), width,
                    out.begin() + static_cast<std::ptrdiff_t>(r * width));
    }
    Shape shape = a.shape();
    shape[0] = rows.size();
    const Tensor in[] = {a};
    return finish(std::move(shape), std::move(out), in, [&] {
        return [idx = std::vector<std::size_t>(rows.begin(), rows.end()), width](
                   std::span<const double> g, std::span<std::vector<double>* const> gi) {
            auto& dst = *gi[0];
            for (std::size_t r = 0; r < idx.size(); ++r)
                for (std::size_t c = 0; c < width; ++c) dst[idx[r] * width + c] += g[r * width + c];
        };
    });
}

Tensor broadcast_rows(const Tensor& a, std::size_t count) {
    if (count == 0) throw ShapeError("broadcast_rows", a.shape(), {0}, "count must be positive");
    Shape shape;
    if (a.rank() == 1) {
        shape = {count, a.dim(0)};
    } else if (a.rank() >= 2 && a.dim(0) == 1) {
        shape = a.shape();
        shape[0] = count;
    } else {
        throw ShapeError("broadcast_rows", a.shape(), {count}, "expected a single row");
    }
    const std::size_t width = a.numel();
    const auto x = a.data();
    std::vector<double> out(count * width);
    for (std::size_t r = 0; r < count; ++r)
        std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(r * width));
    const Tensor in[] = {a};
    return finish(std::move(shape), std::move(out), in, [&] {
        return [count, width](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            auto& dst = *gi[0];
            for (std::size_t r = 0; r < count; ++r)
                for (std::size_t c = 0; c < width; ++c) dst[c] += g[r * width + c];
        };
    });
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (numel(shape) != a.numel()) throw ShapeError("reshape", a.shape(), shape);
    std::vector<double> out(a.data().begin(), a.data().end());
    const Tensor in[] = {a};
    return finish(std::move(shape), std::move(out), in, [] {
        return [](std::span<const double> g, std::span<std::vector<double>* const> gi) {
            for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += g[i];
        };
    });
}

std::string_view op_name(OpKind kind) {
    switch (kind) {
        case OpKind::matmul: return "matmul";
        case OpKind::add: return "add";
        case OpKind::sub: return "sub";
        case OpKind::mul_elementwise: return "mul_elementwise";
        case OpKind::scalar_mul: return "scalar_mul";
        case OpKind::relu: return "relu";
        case OpKind::leaky_relu: return "leaky_relu";
        case OpKind::concat_last_axis: return "concat_last_axis";
        case OpKind::reduce_max_over_axis: return "reduce_max_over_axis";
        case OpKind::reduce_mean_over_axis: return "reduce_mean_over_axis";
        case OpKind::reduce_sum: return "reduce_sum";
        case OpKind::square: return "square";
        case OpKind::log_softmax: return "log_softmax";
        case OpKind::gather_rows: return "gather_rows";
        case OpKind::broadcast_rows: return "broadcast_rows";
        case OpKind::reshape: return "reshape";
    }
    return "unknown";
}

std::size_t op_arity(OpKind kind) {
    switch (kind) {
        case OpKind::matmul:
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul_elementwise:
        case OpKind::concat_last_axis:
            return 2;
        default:
            return 1;
    }
}

Tensor apply_primitive(OpKind kind, std::span<const Tensor> inputs, const OpArgs& args) {
    const bool variadic = kind == OpKind::concat_last_axis;
    if ((variadic && inputs.empty()) || (!variadic && inputs.size() != op_arity(kind)))
        throw InvalidArgument(std::string(op_name(kind)) + ": wrong number of inputs");
    switch (kind) {
        case OpKind::matmul: return matmul(inputs[0], inputs[1]);
        case OpKind::add: return add(inputs[0], inputs[1]);
        case OpKind::sub: return sub(inputs[0], inputs[1]);
        case OpKind::mul_elementwise: return mul(inputs[0], inputs[1]);
        case OpKind::scalar_mul: return scalar_mul(inputs[0], args.scalar);
        case OpKind::relu: return relu(inputs[0]);
        case OpKind::leaky_relu: return leaky_relu(inputs[0], args.slope);
        case OpKind::concat_last_axis: return concat_last_axis(inputs);
        case OpKind::reduce_max_over_axis: return reduce_max(inputs[0], args.axis);
        case OpKind::reduce_mean_over_axis: return reduce_mean(inputs[0], args.axis);
        case OpKind::reduce_sum: return reduce_sum(inputs[0]);
        case OpKind::square: return square(inputs[0]);
        case OpKind::log_softmax: return log_softmax(inputs[0]);
        case OpKind::gather_rows: return gather_rows(inputs[0], args.indices);
        case OpKind::broadcast_rows: return broadcast_rows(inputs[0], args.count);
        case OpKind::reshape: return reshape(inputs[0], args.shape);
    }
    throw InvalidArgument("apply_primitive: unknown op");
}

Tensor softmax_rows(const Tensor& logits) {
    if (logits.rank() != 2) throw ShapeError("softmax_rows", logits.shape(), {}, "expected batch x classes");
    const std::size_t rows = logits.dim(0), cols = logits.dim(1);
    const auto x = logits.data();
    std::vector<double> out(logits.numel());
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = x.subspan(r * cols, cols);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (std::size_t c = 0; c < cols; ++c) z += (out[r * cols + c] = std::exp(row[c] - mx));
        for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] /= z;
    }
    return Tensor(logits.shape(), std::move(out));
}

}  // namespace sen::ad
