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

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sen/trainer/config.hpp"

namespace sen::cli {

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Effective training config: mode-specific defaults, then the key=value
/// file (if any), then command-line overrides. The mode is taken from the
/// overrides first, then the file. Throws InvalidArgument on bad input.
train::TrainConfig resolve_train_config(const std::optional<std::filesystem::path>& file,
                                        const Overrides& overrides);

}  // namespace sen::cli
