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
#include <optional>
#include <span>
#include <vector>

#include "sen/autodiff/tensor.hpp"
#include "sen/common/task.hpp"
#include "sen/models/params.hpp"
#include "sen/pointcloud/pointcloud.hpp"

namespace sen::loss {

/// -(1/N) sum_i log p(y_i | x_i) over rows of (N, C) log-probabilities.
ad::Tensor ce_loss(const ad::Tensor& log_probs, std::span<const std::size_t> labels);

/// -(1/N) sum_i sum_c t_ic log p_ic. Each target row must be a
/// distribution (entries >= 0, sum 1 within 1e-9).
ad::Tensor soft_ce_loss(const ad::Tensor& log_probs, const ad::Tensor& soft_targets);

/// sum ||f_s - f_t||^2 / rows, i.e. the squared L2 distance averaged over
/// the first axis (samples, or samples x points for per-point features).
/// The teacher side is always treated as a constant.
ad::Tensor consistency_loss(const ad::Tensor& f_student, const ad::Tensor& f_teacher);

/// Chamfer distance between decoded and original clouds, averaged over the
/// batch. Both are stacked (batch * M, 3).
ad::Tensor recon_loss(const ad::Tensor& decoded, const ad::Tensor& original, std::size_t batch);
double recon_loss(const pc::PointCloud& decoded, const pc::PointCloud& original);

/// Mean row entropy of a (N, C) probability matrix.
double mean_entropy(const ad::Tensor& probs);

/// One paired mini-batch: labelled source clouds and unlabelled target
/// clouds, both stacked to (batch * M, 3).
struct DomainBatch {
    std::size_t batch = 0;
    ad::Tensor source;
    /// One class per sample (classification) or one part per point
    /// (segmentation).
    std::vector<std::size_t> source_labels;
    /// (batch, C) PointMixup soft labels; replaces source_labels when set.
    std::optional<ad::Tensor> source_soft_labels;
    ad::Tensor target;
    /// Optional separately augmented inputs for the teacher; the student's
    /// inputs are used when absent.
    std::optional<ad::Tensor> teacher_source;
    std::optional<ad::Tensor> teacher_target;

    static DomainBatch make(std::span<const pc::PointCloud> source, std::vector<std::size_t> labels,
                            std::span<const pc::PointCloud> target);
};

struct LossConfig {
    Task task = Task::classification;
    double lambda = 0.2;
    /// Use the PointMixup soft-label loss L_s' in place of L_s.
    bool use_pm = false;
    // Component switches, for baselines and ablations.
    bool soft = true;   // L_soft (classification) / source consistency (segmentation)
    bool recon = true;  // L_t
    bool cons = true;   // L_cons on the target
};

/// Scalar values of every component. In segmentation mode `l_soft` holds
/// the source-domain consistency term that replaces the soft loss.
struct LossBreakdown {
    double l_s = 0.0;
    double l_soft = 0.0;
    double l_t = 0.0;
    double l_cons = 0.0;
    double total = 0.0;
    double lambda = 0.0;

    /// lambda * (l_s + l_soft) + l_t + l_cons.
    double recombined() const { return lambda * (l_s + l_soft) + l_t + l_cons; }

    friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

struct LossResult {
    ad::Tensor total;
    LossBreakdown parts;
};

/// Joint objective lambda (L_s + L_soft) + L_t + L_cons. Teacher passes run
/// without recording, so no gradient reaches the teacher.
LossResult total_loss(const DomainBatch& batch, model::ModelParams& student, model::ModelParams& teacher,
                      const LossConfig& config);

}  // namespace sen::loss
