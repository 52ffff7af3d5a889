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
#include <span>
#include <string>
#include <vector>

namespace sen::cli {

/// A metrics CSV: header names and numeric rows.
struct MetricsTable {
    std::string label;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of `name` in the header; throws FormatError when absent.
    std::size_t column(const std::string& name) const;
    std::vector<double> series(const std::string& name) const;
};

MetricsTable parse_metrics_csv(const std::string& text, std::string label);
MetricsTable read_metrics_csv(const std::filesystem::path& path);

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;  // s / sqrt(n), sample standard deviation; 0 for n = 1
    std::size_t n = 0;
};

MeanSem mean_sem(std::span<const double> values);
/// "mean ± sem" with fixed decimals.
std::string format_mean_sem(const MeanSem& m, int decimals = 4);

/// Final-epoch student and teacher metrics over the runs, as a plain-text
/// table with one mean ± SEM row per metric.
std::string summary_table(std::span<const MetricsTable> runs);

/// Line plot of `column` against epoch, one polyline per run.
std::string render_svg(std::span<const MetricsTable> runs, const std::string& column);

}  // namespace sen::cli
