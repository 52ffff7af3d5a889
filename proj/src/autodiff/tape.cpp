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

#include "sen/autodiff/tape.hpp"

#include <algorithm>

#include "sen/common/error.hpp"

namespace sen::ad {

namespace {

thread_local Tape* g_active_tape = nullptr;

struct TraceState {
    bool enabled = false;
    std::uint64_t hash = 0;
};
thread_local TraceState g_trace;

}  // namespace

Parameter::Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

void Parameter::zero_grad() {
    if (grad.shape() != value.shape()) {
        grad = Tensor(value.shape());
        return;
    }
    auto g = grad.mutable_data();
    std::fill(g.begin(), g.end(), 0.0);
}

Tape::~Tape() {
    if (g_active_tape == this) g_active_tape = nullptr;
}

Tape* Tape::active() { return g_active_tape; }

Tensor Tape::watch(Parameter& p) {
    if (auto it = watched_.find(&p); it != watched_.end()) {
        Tensor t = p.value.detach();
        t.tape_ = this;
        t.node_ = it->second;
        return t;
    }
    Node node;
    node.numel = p.value.numel();
    node.param = &p;
    nodes_.push_back(std::move(node));
    const NodeId id = nodes_.size() - 1;
    watched_.emplace(&p, id);
    Tensor t = p.value.detach();
    t.tape_ = this;
    t.node_ = id;
    return t;
}

Tensor Tape::record(Shape shape, std::vector<double> data, std::span<const Tensor> inputs,
                    BackwardFn backward) {
    Tensor out(std::move(shape), std::move(data));
    Node node;
    node.numel = out.numel();
    node.backward = std::move(backward);
    node.inputs.reserve(inputs.size());
    for (const auto& in : inputs) {
        if (in.tape() == this)
            node.inputs.emplace_back(in.node_id());
        else
            node.inputs.emplace_back(std::nullopt);
    }
    nodes_.push_back(std::move(node));
    out.tape_ = this;
    out.node_ = nodes_.size() - 1;
    return out;
}

void Tape::backward(const Tensor& loss) {
    if (loss.numel() != 1) throw ShapeError("backward", loss.shape(), {}, "loss must be a scalar");
    if (loss.tape() != this) throw InvalidArgument("backward: loss was not recorded on this tape");

    std::vector<std::vector<double>> grads(nodes_.size());
    grads[loss.node_id().value()] = {1.0};

    std::vector<std::vector<double>*> buffers;
    for (NodeId id = loss.node_id().value() + 1; id-- > 0;) {
        auto& g = grads[id];
        if (g.empty()) continue;  // unreachable from loss
        Node& node = nodes_[id];
        if (node.param != nullptr) {
            auto& pg = node.param->grad;
            if (pg.shape() != node.param->value.shape()) pg = Tensor(node.param->value.shape());
            auto dst = pg.mutable_data();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
        } else if (node.backward) {
            buffers.assign(node.inputs.size(), nullptr);
            for (std::size_t i = 0; i < node.inputs.size(); ++i) {
                if (!node.inputs[i]) continue;
                auto& in = grads[*node.inputs[i]];
                if (in.empty()) in.assign(nodes_[*node.inputs[i]].numel, 0.0);
                buffers[i] = &in;
            }
            node.backward(g, buffers);
        }
        std::vector<double>().swap(g);
    }
}

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
TapeScope::~TapeScope() { g_active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(g_active_tape) { g_active_tape = nullptr; }
NoGradScope::~NoGradScope() { g_active_tape = previous_; }

Tensor use(Parameter& p) {
    if (Tape* tape = Tape::active()) return tape->watch(p);
    return p.value.detach();
}

namespace branch_trace {

void begin() {
    g_trace.enabled = true;
    g_trace.hash = 0xcbf29ce484222325ULL;
}

std::uint64_t end() {
    g_trace.enabled = false;
    return g_trace.hash;
}

bool enabled() { return g_trace.enabled; }

void mix(std::uint64_t value) {
    // FNV-1a over the 8 bytes of value.
    for (int i = 0; i < 8; ++i) {
        g_trace.hash ^= (value >> (8 * i)) & 0xffU;
        g_trace.hash *= 0x100000001b3ULL;
    }
}

}  // namespace branch_trace

}  // namespace sen::ad
