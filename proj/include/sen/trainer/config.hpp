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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sen/common/task.hpp"

namespace sen::train {

enum class Method {
    sen,          // full joint objective
    source_only,  // supervised source loss only, the no-adaptation baseline
};

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct TrainConfig {
    Task mode = Task::classification;
    std::size_t batch_size = 32;
    std::size_t epochs = 150;
    double lr0 = 1e-3;
    double lr_min = 0.0;
    double lambda = 0.2;
    double ema_momentum = 0.99;
    /// Ramp the EMA momentum up as min(ema_momentum, t / (t + 1)).
    bool ema_warmup = true;
    double pm_alpha = 0.2;
    bool use_pm = false;
    std::size_t k = 8;
    std::size_t points = 64;
    std::uint64_t seed = 0;
    double jitter_sigma = 0.01;
    double jitter_clip = 0.02;

    Method method = Method::sen;
    // Ablation switches for the individual loss terms.
    bool soft = true;
    bool recon = true;
    bool cons = true;
    /// Skip EMA updates; the teacher keeps its initial weights.
    bool freeze_teacher = false;
    /// Feed the teacher its own independently jittered copy of each input.
    bool teacher_views = false;

    /// Mode-specific defaults: 32 / 150 / 0.2 for classification,
    /// 16 / 200 / 0.05 for segmentation.
    static TrainConfig defaults(Task mode);

    void validate() const;

    /// Ordered key=value view; round-trips through from_entries.
    std::vector<std::pair<std::string, std::string>> entries() const;
    void set(std::string_view key, std::string_view value);
    std::string to_text() const;
    /// Parses key=value lines ('#' comments allowed). The file's mode line,
    /// or `mode` when given, selects the defaults other keys override.
    static TrainConfig from_text(std::string_view text, std::optional<Task> mode = std::nullopt);
    /// FNV-1a of to_text().
    std::uint64_t digest() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace sen::train
