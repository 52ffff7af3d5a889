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

#include "sen/models/params.hpp"

namespace sen::mt {

struct EmaState {
    double momentum = 0.99;  // must lie in [0, 1)
    std::uint64_t step = 0;
    /// Use min(momentum, t / (t + 1)) for the t-th update, so the teacher
    /// starts as a running mean of the student instead of lagging its
    /// random initialization.
    bool warmup = false;
};

/// Deep copy of the student, marked non-trainable.
model::ModelParams init_teacher(const model::ModelParams& student);

double effective_momentum(const EmaState& state);

/// teacher <- a * teacher + (1 - a) * student elementwise, with
/// a = effective_momentum(state).
void ema_update(model::ModelParams& teacher, const model::ModelParams& student, EmaState& state);

}  // namespace sen::mt
