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
#include <filesystem>
#include <functional>
#include <vector>

#include "sen/data_synth/dataset.hpp"
#include "sen/losses/losses.hpp"
#include "sen/mean_teacher/ema.hpp"
#include "sen/models/params.hpp"
#include "sen/trainer/config.hpp"
#include "sen/trainer/optim.hpp"

namespace sen::train {

struct EpochMetrics {
    std::size_t epoch = 0;       // 1-based
    loss::LossBreakdown loss;    // mean over the epoch's steps
    double lr = 0.0;
    double student_metric = 0.0; // accuracy or mIoU on the evaluation set
    double teacher_metric = 0.0;

    friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrainReport {
    TrainConfig config;
    std::vector<EpochMetrics> epochs;
    model::ModelParams student;
    model::ModelParams teacher;
    mt::EmaState ema;
    AdamState adam;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Joint training on labelled `source` and unlabelled `target`. Metrics are
/// measured on `eval` after every epoch (the target set when null).
/// Throws NumericError naming the first non-finite loss component.
TrainReport train(const TrainConfig& cfg, const synth::Dataset& source, const synth::Dataset& target,
                  const synth::Dataset* eval = nullptr, const EpochCallback& on_epoch = {});

std::string metrics_csv_header(Task mode);
std::string metrics_csv_row(const EpochMetrics& m);
std::string metrics_csv(const TrainReport& report);

}  // namespace sen::train
