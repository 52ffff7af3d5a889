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

#include "sen/models/params.hpp"

#include <cmath>

#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"

namespace sen::model {

Arch Arch::desk(Task task, std::size_t num_classes, std::size_t points) {
    Arch a;
    a.task = task;
    a.num_classes = num_classes;
    a.points = points;
    return a;
}

Arch Arch::tiny(Task task) {
    Arch a;
    a.task = task;
    a.points = 16;
    a.k = 4;
    a.edge_widths = {8, 8};
    a.latent = 16;
    a.head_hidden = 8;
    a.point_width = 8;
    a.decoder_widths = {16, 16, 8};
    a.num_classes = 3;
    return a;
}

std::pair<std::size_t, std::size_t> Arch::grid_dims() const {
    auto rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(points)));
    while (rows * rows > points) --rows;
    while ((rows + 1) * (rows + 1) <= points) ++rows;
    rows = std::max<std::size_t>(rows, 1);
    const std::size_t cols = (points + rows - 1) / rows;
    return {rows, cols};
}

namespace {

void validate(const Arch& a) {
    if (a.points < 2 || a.k < 1 || a.k >= a.points)
        throw InvalidArgument("Arch: need points >= 2 and 1 <= k < points");
    if (a.edge_widths.empty() || a.latent == 0 || a.head_hidden == 0 || a.point_width == 0 || a.num_classes < 2 ||
        a.decoder_widths.empty())
        throw InvalidArgument("Arch: empty layer specification");
}

}  // namespace

ModelParams::ModelParams(const Arch& arch, std::uint64_t seed) : arch_(arch) {
    validate(arch_);
    Rng rng(seed);
    // He-uniform for layers feeding a leaky ReLU, plain 1/sqrt(fan_in) for
    // the output layers.
    auto bound = [](std::size_t fan_in) { return std::sqrt(6.0 / static_cast<double>(fan_in)); };
    auto out_bound = [](std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };

    std::size_t in = 3;
    std::size_t concat_width = 0;
    for (std::size_t l = 0; l < arch_.edge_widths.size(); ++l) {
        const std::size_t out = arch_.edge_widths[l];
        const std::string p = "encoder.edgeconv" + std::to_string(l + 1) + ".";
        // The MLP input is concat(h_i, h_j - h_i); its weight matrix is
        // stored as the two row blocks acting on each half.
        add(p + "w_center", {in, out}, bound(2 * in), rng);
        add(p + "w_edge", {in, out}, bound(2 * in), rng);
        add_filled(p + "scale", {out}, 1.0);
        add_filled(p + "shift", {out}, 0.0);
        concat_width += out;
        in = out;
    }
    add("encoder.global.w", {concat_width, arch_.latent}, bound(concat_width), rng);
    add_filled("encoder.global.scale", {arch_.latent}, 1.0);
    add_filled("encoder.global.shift", {arch_.latent}, 0.0);

    if (arch_.task == Task::classification) {
        add("classifier.fc1.w", {arch_.latent, arch_.head_hidden}, bound(arch_.latent), rng);
        add("classifier.fc1.b", {arch_.head_hidden}, out_bound(arch_.latent), rng);
        add("classifier.fc2.w", {arch_.head_hidden, arch_.num_classes}, out_bound(arch_.head_hidden), rng);
        add("classifier.fc2.b", {arch_.num_classes}, out_bound(arch_.head_hidden), rng);
    } else {
        // Per-point features fuse each point's local features with the
        // global one; a linear layer maps them to part logits.
        const std::size_t w = concat_width + arch_.latent;
        const std::size_t p = arch_.point_width;
        add("encoder.point.w", {w, p}, bound(w), rng);
        add_filled("encoder.point.scale", {p}, 1.0);
        add_filled("encoder.point.shift", {p}, 0.0);
        add("segmenter.fc1.w", {p, p}, bound(p), rng);
        add("segmenter.fc1.b", {p}, out_bound(p), rng);
        add("segmenter.fc2.w", {p, arch_.num_classes}, out_bound(p), rng);
        add("segmenter.fc2.b", {arch_.num_classes}, out_bound(p), rng);
    }

    in = arch_.latent + 2;
    std::vector<std::size_t> widths = arch_.decoder_widths;
    widths.push_back(3);
    for (std::size_t l = 0; l < widths.size(); ++l) {
        const std::string p = "decoder.fc" + std::to_string(l + 1) + ".";
        const double b = l + 1 == widths.size() ? out_bound(in) : bound(in);
        add(p + "w", {in, widths[l]}, b, rng);
        add(p + "b", {widths[l]}, out_bound(in), rng);
        in = widths[l];
    }
}

void ModelParams::add(std::string name, ad::Shape shape, double bound, Rng& rng) {
    std::vector<double> v(ad::numel(shape));
    for (auto& x : v) x = rng.uniform(-bound, bound);
    index_.emplace(name, params_.size());
    params_.emplace_back(std::move(name), ad::Tensor(std::move(shape), std::move(v)));
}

void ModelParams::add_filled(std::string name, ad::Shape shape, double value) {
    index_.emplace(name, params_.size());
    params_.emplace_back(std::move(name), ad::Tensor::full(std::move(shape), value));
}

std::vector<ad::Parameter*> ModelParams::parameter_ptrs() {
    std::vector<ad::Parameter*> out;
    out.reserve(params_.size());
    for (auto& p : params_) out.push_back(&p);
    return out;
}

ad::Parameter& ModelParams::at(const std::string& name) {
    const auto it = index_.find(name);
    if (it == index_.end()) throw InvalidArgument("ModelParams: no parameter named '" + name + "'");
    return params_[it->second];
}

const ad::Parameter& ModelParams::at(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw InvalidArgument("ModelParams: no parameter named '" + name + "'");
    return params_[it->second];
}

ad::Tensor ModelParams::use(const std::string& name) {
    ad::Parameter& p = at(name);
    return trainable_ ? ad::use(p) : p.value.detach();
}

void ModelParams::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

std::size_t ModelParams::size() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.numel();
    return n;
}

bool ModelParams::same_layout(const ModelParams& other) const {
    if (params_.size() != other.params_.size()) return false;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name != other.params_[i].name) return false;
        if (params_[i].value.shape() != other.params_[i].value.shape()) return false;
    }
    return true;
}

void ModelParams::require_same_layout(const ModelParams& other, const char* op) const {
    if (params_.size() != other.params_.size())
        throw InvalidArgument(std::string(op) + ": parameter counts differ");
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto& a = params_[i];
        const auto& b = other.params_[i];
        if (a.name != b.name) throw InvalidArgument(std::string(op) + ": name mismatch " + a.name + " vs " + b.name);
        if (a.value.shape() != b.value.shape())
            throw ShapeError(op, a.value.shape(), b.value.shape(), "parameter " + a.name);
    }
}

}  // namespace sen::model
