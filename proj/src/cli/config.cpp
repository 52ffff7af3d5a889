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

#include "sen/cli/config.hpp"

#include "sen/common/binary_io.hpp"

namespace sen::cli {

train::TrainConfig resolve_train_config(const std::optional<std::filesystem::path>& file,
                                        const Overrides& overrides) {
    std::optional<Task> mode;
    for (const auto& [key, value] : overrides)
        if (key == "mode") mode = parse_task(value);
    train::TrainConfig cfg = file ? train::TrainConfig::from_text(io::read_file(*file), mode)
                                  : train::TrainConfig::defaults(mode.value_or(Task::classification));
    for (const auto& [key, value] : overrides)
        if (key != "mode") cfg.set(key, value);
    cfg.validate();
    return cfg;
}

}  // namespace sen::cli
