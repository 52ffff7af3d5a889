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

#include "sen/mean_teacher/ema.hpp"

#include <algorithm>

#include "sen/common/error.hpp"

namespace sen::mt {

model::ModelParams init_teacher(const model::ModelParams& student) {
    model::ModelParams teacher = student;
    for (auto& p : teacher.parameters()) {
        // Detach storage so later in-place updates of either model stay local.
        p.value = ad::Tensor(p.value.shape(), std::vector<double>(p.value.data().begin(), p.value.data().end()));
        p.zero_grad();
    }
    teacher.set_trainable(false);
    return teacher;
}

double effective_momentum(const EmaState& state) {
    if (!state.warmup) return state.momentum;
    const double t = static_cast<double>(state.step + 1);
    return std::min(state.momentum, t / (t + 1.0));
}

void ema_update(model::ModelParams& teacher, const model::ModelParams& student, EmaState& state) {
    if (!(state.momentum >= 0.0 && state.momentum < 1.0))
        throw InvalidArgument("ema_update: momentum must lie in [0, 1)");
    teacher.require_same_layout(student, "ema_update");
    const double a = effective_momentum(state);
    const double b = 1.0 - a;
    auto tp = teacher.parameters();
    auto sp = student.parameters();
    for (std::size_t i = 0; i < tp.size(); ++i) {
        auto dst = tp[i].value.mutable_data();
        const auto src = sp[i].value.data();
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = a * dst[j] + b * src[j];
    }
    ++state.step;
}

}  // namespace sen::mt
