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

#include "sen/pointcloud/chamfer.hpp"

#include <cmath>
#include <limits>

#include "sen/autodiff/ops.hpp"
#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"

namespace sen::pc {

namespace {

// Correctly rounded sum (Shewchuk's partials, as in Python's math.fsum), so
// the result does not depend on point order.
double exact_sum(std::span<const double> terms) {
    std::vector<double> partials;
    for (double x : terms) {
        std::size_t n = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[n++] = lo;
            x = hi;
        }
        partials.resize(n);
        partials.push_back(x);
    }
    if (partials.empty()) return 0.0;
    std::size_t n = partials.size() - 1;
    double hi = partials[n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials[--n];
        hi = x + y;
        lo = y - (hi - x);
        if (lo != 0.0) break;
    }
    // Half-way case: the remaining partials decide the rounding direction.
    if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

}  // namespace

std::vector<std::size_t> nearest_indices(std::span<const double> from, std::size_t n,
                                         std::span<const double> to, std::size_t m) {
    if (n == 0 || m == 0) throw InvalidArgument("chamfer_distance: empty cloud");
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = from.data() + 3 * i;
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double* b = to.data() + 3 * j;
            const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
            const double d = dx * dx + dy * dy + dz * dz;
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        out[i] = arg;
    }
    if (ad::branch_trace::enabled())
        for (auto idx : out) ad::branch_trace::mix(idx);
    return out;
}

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
    require_non_empty(a, "chamfer_distance");
    require_non_empty(b, "chamfer_distance");
    const auto ab = nearest_indices(a.xyz(), a.size(), b.xyz(), b.size());
    const auto ba = nearest_indices(b.xyz(), b.size(), a.xyz(), a.size());
    std::vector<double> forward(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) forward[i] = squared_distance(a.point(i), b.point(ab[i]));
    std::vector<double> backward(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) backward[j] = squared_distance(a.point(ba[j]), b.point(j));
    forward.insert(forward.end(), backward.begin(), backward.end());
    return exact_sum(forward);
}

ad::Tensor chamfer_distance(const ad::Tensor& a, const ad::Tensor& b) {
    return chamfer_distance_batched(a, b, 1);
}

ad::Tensor chamfer_distance_batched(const ad::Tensor& a, const ad::Tensor& b, std::size_t batch) {
    if (a.rank() != 2 || a.dim(1) != 3 || b.rank() != 2 || b.dim(1) != 3)
        throw ShapeError("chamfer_distance", a.shape(), b.shape(), "expected (n, 3) point sets");
    if (batch == 0 || a.dim(0) % batch != 0 || b.dim(0) % batch != 0)
        throw ShapeError("chamfer_distance", a.shape(), b.shape(), "rows not divisible by batch");
    const std::size_t n = a.dim(0) / batch;
    const std::size_t m = b.dim(0) / batch;

    std::vector<std::size_t> ab(a.dim(0));
    std::vector<std::size_t> ba(b.dim(0));
    for (std::size_t s = 0; s < batch; ++s) {
        const auto sa = a.data().subspan(s * n * 3, n * 3);
        const auto sb = b.data().subspan(s * m * 3, m * 3);
        const auto nab = nearest_indices(sa, n, sb, m);
        const auto nba = nearest_indices(sb, m, sa, n);
        for (std::size_t i = 0; i < n; ++i) ab[s * n + i] = s * m + nab[i];
        for (std::size_t j = 0; j < m; ++j) ba[s * m + j] = s * n + nba[j];
    }
    const ad::Tensor forward = ad::reduce_sum(ad::square(ad::sub(a, ad::gather_rows(b, ab))));
    const ad::Tensor backward = ad::reduce_sum(ad::square(ad::sub(ad::gather_rows(a, ba), b)));
    return ad::add(forward, backward);
}

}  // namespace sen::pc
