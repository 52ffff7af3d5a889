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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sen/common/task.hpp"
#include "sen/data_synth/domain.hpp"
#include "sen/data_synth/shapes.hpp"
#include "sen/pointcloud/pointcloud.hpp"

namespace sen::synth {

/// Labelled clouds of equal size. Classification stores one label per cloud,
/// segmentation one label per point (size() * points entries).
struct Dataset {
    Task task = Task::classification;
    std::size_t points = 0;
    std::size_t num_classes = 0;
    std::vector<pc::PointCloud> clouds;
    std::vector<std::size_t> labels;

    std::size_t size() const { return clouds.size(); }
    std::size_t label(std::size_t i) const { return labels[i]; }
    std::span<const std::size_t> part_labels(std::size_t i) const { return {labels.data() + i * points, points}; }

    void validate() const;
};

struct SplitRatios {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;
};

struct DatasetSplits {
    Dataset train, val, test;
};

struct BuildOptions {
    Task task = Task::classification;
    std::size_t per_class = 100;
    std::size_t m_final = 64;
    /// Raw surface samples per shape; 0 picks 32 * m_final (at least 64).
    std::size_t m_raw = 0;
    SplitRatios split;
    std::uint64_t seed = 0;
};

/// Generates per_class samples of every spec, applies the domain profile,
/// normalizes to the unit sphere and splits each class 70/10/20.
/// Classification labels are spec indices; segmentation labels are parts.
DatasetSplits build_dataset(std::span<const ShapeSpec> classes, const DomainProfile& profile,
                            const BuildOptions& options);

std::string encode_pcds(const Dataset& data);
Dataset decode_pcds(std::string_view bytes);
void write_pcds(const Dataset& data, const std::filesystem::path& path);
Dataset read_pcds(const std::filesystem::path& path);

/// One point per row: sample_id,x,y,z,label.
void export_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace sen::synth
