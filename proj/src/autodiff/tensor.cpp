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

#include "sen/autodiff/tensor.hpp"

#include <functional>
#include <numeric>

#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"

namespace sen::ad {

std::size_t numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor() : data_(std::make_shared<std::vector<double>>(1, 0.0)) {}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), data_(std::make_shared<std::vector<double>>(ad::numel(shape_), 0.0)) {
    for (auto d : shape_)
        if (d == 0) throw ShapeError("Tensor", shape_, {}, "dimensions must be positive");
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::make_shared<std::vector<double>>(std::move(data))) {
    for (auto d : shape_)
        if (d == 0) throw ShapeError("Tensor", shape_, {}, "dimensions must be positive");
    if (ad::numel(shape_) != data_->size())
        throw ShapeError("Tensor", shape_, {data_->size()}, "element count does not match shape");
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::full(Shape shape, double value) {
    const auto n = ad::numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) throw ShapeError("dim", shape_, {axis}, "axis out of range");
    return shape_[axis];
}

std::span<double> Tensor::mutable_data() {
    if (data_.use_count() > 1) data_ = std::make_shared<std::vector<double>>(*data_);
    return *data_;
}

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item", shape_, {1}, "tensor is not a scalar");
    return (*data_)[0];
}

std::optional<NodeId> Tensor::node_id() const {
    if (tape_ == nullptr) return std::nullopt;
    return node_;
}

bool Tensor::tracked() const { return tape_ != nullptr && tape_ == Tape::active(); }

Tensor Tensor::detach() const {
    Tensor t;
    t.shape_ = shape_;
    t.data_ = data_;
    return t;
}

}  // namespace sen::ad
