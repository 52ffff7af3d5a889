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

#include "sen/trainer/metrics.hpp"

#include <algorithm>

#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"
#include "sen/models/network.hpp"

namespace sen::train {

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
    if (truth.empty()) throw InvalidArgument("accuracy: empty input");
    if (predicted.size() != truth.size()) throw InvalidArgument("accuracy: prediction count differs from labels");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double sample_miou(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                   std::size_t num_classes) {
    if (truth.empty()) throw InvalidArgument("sample_miou: empty input");
    if (predicted.size() != truth.size()) throw InvalidArgument("sample_miou: prediction count differs from labels");
    std::vector<std::size_t> tp(num_classes), fp(num_classes), fn(num_classes), present(num_classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto p = predicted[i], t = truth[i];
        if (p >= num_classes || t >= num_classes) throw InvalidArgument("sample_miou: label out of range");
        present[t] = 1;
        if (p == t) {
            ++tp[t];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }
    double sum = 0.0;
    std::size_t classes = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (!present[c]) continue;
        sum += static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c] + fn[c]);
        ++classes;
    }
    return sum / static_cast<double>(classes);
}

std::vector<std::size_t> predict(model::ModelParams& model, const synth::Dataset& data, std::size_t batch) {
    if (data.size() == 0) throw InvalidArgument("evaluate: empty dataset");
    if (batch == 0) throw InvalidArgument("evaluate: batch must be positive");
    const auto& arch = model.arch();
    if (data.task != arch.task) throw InvalidArgument("evaluate: dataset task does not match the model");
    if (data.points != arch.points) throw InvalidArgument("evaluate: dataset point count does not match the model");
    if (data.num_classes != arch.num_classes)
        throw InvalidArgument("evaluate: dataset class count does not match the model");

    ad::NoGradScope no_grad;
    std::vector<std::size_t> out;
    for (std::size_t first = 0; first < data.size(); first += batch) {
        const std::size_t n = std::min(batch, data.size() - first);
        const auto x = pc::stack_clouds(std::span(data.clouds).subspan(first, n));
        std::vector<std::size_t> pred;
        if (arch.task == Task::classification) {
            const auto enc = model::encode(x, n, model, model::EncodeMode::global);
            pred = model::argmax_rows(model::classify(enc.global, model));
        } else {
            const auto enc = model::encode(x, n, model, model::EncodeMode::per_point);
            pred = model::argmax_rows(model::segment(enc.per_point, model));
        }
        out.insert(out.end(), pred.begin(), pred.end());
    }
    return out;
}

double evaluate(model::ModelParams& model, const synth::Dataset& data, std::size_t batch) {
    const auto pred = predict(model, data, batch);
    if (data.task == Task::classification) return accuracy(pred, data.labels);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::span<const std::size_t> p(pred.data() + i * data.points, data.points);
        sum += sample_miou(p, data.part_labels(i), data.num_classes);
    }
    return sum / static_cast<double>(data.size());
}

}  // namespace sen::train
