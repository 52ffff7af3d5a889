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
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sen/autodiff/tape.hpp"
#include "sen/common/rng.hpp"
#include "sen/common/task.hpp"

namespace sen::model {

/// Layer sizes of the network. Fixed once a ModelParams is built.
struct Arch {
    Task task = Task::classification;
    std::size_t points = 64;                         // M
    std::size_t k = 8;                               // kNN neighbours
    std::vector<std::size_t> edge_widths{32, 64};    // EdgeConv outputs
    std::size_t latent = 128;                        // F
    std::size_t head_hidden = 64;                    // classifier hidden
    std::size_t point_width = 48;                    // per-point features and segmenter hidden
    std::vector<std::size_t> decoder_widths{64, 64, 64};  // hidden layers; output 3 is implicit
    std::size_t num_classes = 6;
    /// Recompute the kNN graph in feature space after the first EdgeConv.
    bool dynamic_graph = true;

    static Arch desk(Task task, std::size_t num_classes, std::size_t points = 64);
    /// The small network used by the gradient-check suite.
    static Arch tiny(Task task = Task::classification);

    /// Rows x cols of the folding grid; rows * cols >= points.
    std::pair<std::size_t, std::size_t> grid_dims() const;

    friend bool operator==(const Arch&, const Arch&) = default;
};

/// Ordered, named parameter set of encoder, task head and decoder.
/// Copies are deep. A non-trainable instance (the teacher) is never
/// watched by a tape.
class ModelParams {
public:
    ModelParams(const Arch& arch, std::uint64_t seed);

    const Arch& arch() const { return arch_; }

    std::span<ad::Parameter> parameters() { return params_; }
    std::span<const ad::Parameter> parameters() const { return params_; }
    std::vector<ad::Parameter*> parameter_ptrs();

    ad::Parameter& at(const std::string& name);
    const ad::Parameter& at(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.contains(name); }

    /// Tensor for use in a forward pass: tape-watched when trainable and a
    /// tape is active, a constant otherwise.
    ad::Tensor use(const std::string& name);

    bool trainable() const { return trainable_; }
    void set_trainable(bool trainable) { trainable_ = trainable; }

    void zero_grad();
    /// Total number of scalar parameters.
    std::size_t size() const;
    /// Same names, order and shapes.
    bool same_layout(const ModelParams& other) const;
    /// Throws InvalidArgument naming the first difference.
    void require_same_layout(const ModelParams& other, const char* op) const;

private:
    void add(std::string name, ad::Shape shape, double bound, Rng& rng);
    void add_filled(std::string name, ad::Shape shape, double value);

    Arch arch_;
    std::vector<ad::Parameter> params_;
    std::unordered_map<std::string, std::size_t> index_;
    bool trainable_ = true;
};

}  // namespace sen::model
