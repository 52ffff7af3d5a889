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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sen/mean_teacher/ema.hpp"
#include "sen/models/params.hpp"
#include "sen/trainer/optim.hpp"

namespace sen::train {

struct Checkpoint {
    std::uint64_t config_digest = 0;
    model::ModelParams model;
    std::optional<mt::EmaState> ema;
    std::optional<AdamState> adam;
};

// Layout: "SENC", version u32, config digest u64, entry count u64, then per
// entry: name length u32, name bytes, rank u32, dims u64 each, f64 values.
// Architecture, EMA and Adam state travel as entries named "@arch.*",
// "@ema.*" and "@adam.*" ahead of the model parameters.
std::string encode_checkpoint(const model::ModelParams& model, std::uint64_t config_digest,
                              const mt::EmaState* ema = nullptr, const AdamState* adam = nullptr);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const model::ModelParams& model,
                     std::uint64_t config_digest, const mt::EmaState* ema = nullptr,
                     const AdamState* adam = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sen::train
