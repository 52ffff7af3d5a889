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

#include "sen/trainer/optim.hpp"

#include <cmath>
#include <numbers>

#include "sen/common/error.hpp"

namespace sen::train {

AdamState AdamState::for_parameters(std::span<const ad::Parameter> params) {
    AdamState s;
    for (const auto& p : params) {
        s.m.emplace_back(p.value.numel(), 0.0);
        s.v.emplace_back(p.value.numel(), 0.0);
    }
    return s;
}

void adam_step(std::span<ad::Parameter> params, AdamState& state, double lr) {
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw InvalidArgument("adam_step: state does not match the parameter list");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        const auto g = p.grad.data();
        auto& m = state.m[i];
        auto& v = state.v[i];
        if (m.size() != g.size() || v.size() != g.size())
            throw InvalidArgument("adam_step: moment shape differs for " + p.name);
        auto x = p.value.mutable_data();
        for (std::size_t j = 0; j < g.size(); ++j) {
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
            const double mh = m[j] / c1;
            const double vh = v[j] / c2;
            x[j] -= lr * mh / (std::sqrt(vh) + state.eps);
        }
    }
}

double cosine_lr(std::size_t t, std::size_t total, double lr0, double lr_min) {
    if (total == 0 || t > total) throw InvalidArgument("cosine_lr: need 0 <= t <= T with T > 0");
    const double ratio = static_cast<double>(t) / static_cast<double>(total);
    return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(std::numbers::pi * ratio));
}

}  // namespace sen::train
