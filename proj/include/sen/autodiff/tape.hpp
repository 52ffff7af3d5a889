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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sen/autodiff/tensor.hpp"

namespace sen::ad {

/// Trainable value with its accumulated gradient. `grad` always has the
/// shape of `value`.
struct Parameter {
    Parameter() = default;
    Parameter(std::string name, Tensor value);

    std::string name;
    Tensor value;
    Tensor grad;

    void zero_grad();
};

/// Adjoint of one recorded op. `grad_in[i]` is null when input i is a
/// constant; otherwise it is sized to that input and must be accumulated
/// into (never overwritten).
using BackwardFn = std::function<void(std::span<const double> grad_out,
                                      std::span<std::vector<double>* const> grad_in)>;

/// Define-by-run record of ops. Built fresh for every training step.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    ~Tape();

    /// Leaf tensor bound to `p`; backward() accumulates into p.grad.
    /// Watching the same parameter twice returns the same node.
    Tensor watch(Parameter& p);

    /// Appends a node whose inputs are `inputs` (constants allowed).
    Tensor record(Shape shape, std::vector<double> data, std::span<const Tensor> inputs,
                  BackwardFn backward);

    /// Reverse sweep from a single-element `loss` recorded on this tape.
    void backward(const Tensor& loss);

    std::size_t size() const { return nodes_.size(); }
    bool owns(const Tensor& t) const { return t.tape() == this; }

    /// Tape ops currently record onto (thread-local), or null.
    static Tape* active();

private:
    friend class TapeScope;
    friend class NoGradScope;

    struct Node {
        std::vector<std::optional<NodeId>> inputs;
        std::size_t numel = 0;
        BackwardFn backward;
        Parameter* param = nullptr;
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, NodeId> watched_;
};

/// Makes `tape` the active tape for the current thread until destroyed.
class TapeScope {
public:
    explicit TapeScope(Tape& tape);
    ~TapeScope();
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

private:
    Tape* previous_;
};

/// Disables recording for the current thread until destroyed.
class NoGradScope {
public:
    NoGradScope();
    ~NoGradScope();
    NoGradScope(const NoGradScope&) = delete;
    NoGradScope& operator=(const NoGradScope&) = delete;

private:
    Tape* previous_;
};

/// Tensor view of a parameter: watched on the active tape if there is one,
/// a constant otherwise.
Tensor use(Parameter& p);

/// Fingerprint of the discrete decisions (relu signs, argmax/argmin picks,
/// neighbor lists) taken during a forward pass. Two evaluations with equal
/// fingerprints ran through the same smooth piece of the function.
namespace branch_trace {
void begin();
std::uint64_t end();
bool enabled();
void mix(std::uint64_t value);
}  // namespace branch_trace

}  // namespace sen::ad
