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
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace sen::ad {

using Shape = std::vector<std::size_t>;
using NodeId = std::size_t;

class Tape;

std::size_t numel(const Shape& shape);

/// Dense row-major f64 array. Copies share storage; writes through
/// mutable_data() detach first. A tensor produced while a Tape is active
/// carries a node handle into that tape.
class Tensor {
public:
    /// Rank-0 scalar holding 0.
    Tensor();
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor scalar(double value);
    static Tensor full(Shape shape, double value);

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t numel() const { return data_->size(); }
    std::size_t dim(std::size_t axis) const;

    std::span<const double> data() const { return *data_; }
    std::span<double> mutable_data();
    double operator[](std::size_t i) const { return (*data_)[i]; }
    /// Value of a single-element tensor.
    double item() const;

    /// Node handle, present only when the tensor was recorded on a tape.
    std::optional<NodeId> node_id() const;
    /// True when recorded on the currently active tape.
    bool tracked() const;
    const Tape* tape() const { return tape_; }
    /// Same values, no tape link.
    Tensor detach() const;

    /// Shared storage, so backward closures can keep forward values alive
    /// without copying them.
    std::shared_ptr<const std::vector<double>> storage() const { return data_; }

private:
    friend class Tape;

    Shape shape_;
    std::shared_ptr<std::vector<double>> data_;
    const Tape* tape_ = nullptr;
    NodeId node_ = 0;
};

}  // namespace sen::ad
