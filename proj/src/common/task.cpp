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

#include "sen/common/task.hpp"

#include "sen/common/error.hpp"

namespace sen {

std::string_view task_name(Task task) {
    return task == Task::classification ? "classification" : "segmentation";
}

Task parse_task(std::string_view name) {
    if (name == "classification" || name == "cls") return Task::classification;
    if (name == "segmentation" || name == "seg") return Task::segmentation;
    throw InvalidArgument("unknown mode '" + std::string(name) + "' (expected classification|segmentation)");
}

}  // namespace sen
