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
#include <span>
#include <vector>

#include "sen/autodiff/tape.hpp"

namespace sen::train {

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    /// First and second moments, one vector per parameter, same order.
    std::vector<std::vector<double>> m, v;

    static AdamState for_parameters(std::span<const ad::Parameter> params);
};

/// One bias-corrected Adam update from the gradients stored in `params`.
void adam_step(std::span<ad::Parameter> params, AdamState& state, double lr);

/// lr_min + (lr0 - lr_min) (1 + cos(pi t / T)) / 2 for 0 <= t <= T.
double cosine_lr(std::size_t t, std::size_t total, double lr0, double lr_min);

}  // namespace sen::train
