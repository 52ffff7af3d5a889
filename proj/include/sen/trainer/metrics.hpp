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
#include <span>
#include <vector>

#include "sen/data_synth/dataset.hpp"
#include "sen/models/params.hpp"

namespace sen::train {

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);

/// IoU = TP / (TP + FP + FN) per class present in `truth`, averaged.
double sample_miou(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                   std::size_t num_classes);

/// Class per cloud (classification) or part per point (segmentation).
std::vector<std::size_t> predict(model::ModelParams& model, const synth::Dataset& data, std::size_t batch = 64);

/// Mean accuracy, or mIoU averaged over samples in segmentation mode.
double evaluate(model::ModelParams& model, const synth::Dataset& data, std::size_t batch = 64);

}  // namespace sen::train
