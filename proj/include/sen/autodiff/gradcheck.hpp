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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sen/autodiff/tape.hpp"

namespace sen::ad {

/// |a - b| / max(|a|, |b|, 1e-8); 0 when both are 0.
double relative_error(double a, double b);

struct GradCheckOptions {
    double step = 1e-3;
    /// Fourth-order stencil (f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)) / 12h;
    /// the plain central difference (f(x+h) - f(x-h)) / 2h otherwise.
    bool five_point = true;
    double tolerance = 1e-4;
    /// Entries per parameter to probe; 0 checks all of them. When limited,
    /// entries are spread evenly across the tensor.
    std::size_t max_entries_per_param = 0;
};

struct ParamGradCheck {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    /// Entries where x +/- h crossed a kink (relu sign, argmax, argmin or
    /// neighbor change) so the central difference is not a derivative.
    std::size_t skipped = 0;
    std::size_t failed = 0;
};

struct GradCheckReport {
    std::vector<ParamGradCheck> params;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    /// Human-readable lines for the first few failing entries.
    std::vector<std::string> failures;

    bool passed() const { return failed == 0; }
};

/// Compares the tape gradient of `loss` against finite differences for
/// every entry of every parameter; entries whose stencil crosses a kink are
/// skipped. `loss` must
/// read parameters through ad::use() and be deterministic. Parameter values
/// are restored bitwise afterwards; grads hold the tape gradient.
GradCheckReport finite_difference_check(const std::function<Tensor()>& loss,
                                        std::span<Parameter* const> params,
                                        const GradCheckOptions& options = {});

}  // namespace sen::ad
