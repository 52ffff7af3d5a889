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

#include "sen/losses/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sen/autodiff/ops.hpp"
#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"
#include "sen/models/network.hpp"
#include "sen/pointcloud/chamfer.hpp"

namespace sen::loss {

ad::Tensor ce_loss(const ad::Tensor& log_probs, std::span<const std::size_t> labels) {
    if (log_probs.rank() != 2 || log_probs.dim(0) != labels.size())
        throw ShapeError("ce_loss", log_probs.shape(), {labels.size()}, "one label per row");
    const std::size_t n = log_probs.dim(0), c = log_probs.dim(1);
    std::vector<double> onehot(n * c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] >= c)
            throw InvalidArgument("ce_loss: label " + std::to_string(labels[i]) + " out of range for " +
                                  std::to_string(c) + " classes");
        onehot[i * c + labels[i]] = 1.0;
    }
    const ad::Tensor picked = ad::mul(log_probs, ad::Tensor(log_probs.shape(), std::move(onehot)));
    return ad::scalar_mul(ad::reduce_sum(picked), -1.0 / static_cast<double>(n));
}

ad::Tensor soft_ce_loss(const ad::Tensor& log_probs, const ad::Tensor& soft_targets) {
    if (log_probs.rank() != 2 || log_probs.shape() != soft_targets.shape())
        throw ShapeError("soft_ce_loss", log_probs.shape(), soft_targets.shape());
    const std::size_t n = log_probs.dim(0), c = log_probs.dim(1);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const double t = soft_targets[i * c + j];
            if (!(t >= 0.0)) throw InvalidArgument("soft_ce_loss: negative or NaN target");
            sum += t;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw InvalidArgument("soft_ce_loss: target row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    const ad::Tensor weighted = ad::mul(log_probs, soft_targets.detach());
    return ad::scalar_mul(ad::reduce_sum(weighted), -1.0 / static_cast<double>(n));
}

ad::Tensor consistency_loss(const ad::Tensor& f_student, const ad::Tensor& f_teacher) {
    if (f_student.shape() != f_teacher.shape() || f_student.rank() == 0)
        throw ShapeError("consistency_loss", f_student.shape(), f_teacher.shape());
    const ad::Tensor d = ad::sub(f_student, f_teacher.detach());
    return ad::scalar_mul(ad::reduce_sum(ad::square(d)), 1.0 / static_cast<double>(f_student.dim(0)));
}

ad::Tensor recon_loss(const ad::Tensor& decoded, const ad::Tensor& original, std::size_t batch) {
    return ad::scalar_mul(pc::chamfer_distance_batched(decoded, original, batch), 1.0 / static_cast<double>(batch));
}

double recon_loss(const pc::PointCloud& decoded, const pc::PointCloud& original) {
    return pc::chamfer_distance(decoded, original);
}

double mean_entropy(const ad::Tensor& probs) {
    if (probs.rank() != 2) throw ShapeError("mean_entropy", probs.shape(), {}, "expected (N, C)");
    double h = 0.0;
    for (double p : probs.data())
        if (p > 0.0) h -= p * std::log(p);
    return h / static_cast<double>(probs.dim(0));
}

DomainBatch DomainBatch::make(std::span<const pc::PointCloud> source, std::vector<std::size_t> labels,
                              std::span<const pc::PointCloud> target) {
    if (source.size() != target.size())
        throw InvalidArgument("DomainBatch: source and target batch sizes differ (" + std::to_string(source.size()) +
                              " vs " + std::to_string(target.size()) + ")");
    DomainBatch b;
    b.batch = source.size();
    b.source = pc::stack_clouds(source);
    b.source_labels = std::move(labels);
    b.target = pc::stack_clouds(target);
    return b;
}

namespace {

ad::Tensor teacher_view(const std::optional<ad::Tensor>& view, const ad::Tensor& fallback) {
    return view ? *view : fallback;
}

}  // namespace

LossResult total_loss(const DomainBatch& batch, model::ModelParams& student, model::ModelParams& teacher,
                      const LossConfig& config) {
    if (config.lambda < 0.0) throw InvalidArgument("total_loss: lambda must be >= 0");
    student.require_same_layout(teacher, "total_loss");
    const bool segmentation = config.task == Task::segmentation;
    const auto mode = segmentation ? model::EncodeMode::per_point : model::EncodeMode::global;
    const std::size_t b = batch.batch;
    const ad::Tensor zero = ad::Tensor::scalar(0.0);

    // Source branch.
    const model::Encoding src = model::encode(batch.source, b, student, mode);
    ad::Tensor l_s, l_soft = zero;
    if (segmentation) {
        const ad::Tensor lp = ad::log_softmax(model::segment(src.per_point, student));
        l_s = ce_loss(lp, batch.source_labels);
        if (config.soft) {
            ad::Tensor teacher_feat;
            {
                ad::NoGradScope no_grad;
                teacher_feat = model::encode(teacher_view(batch.teacher_source, batch.source), b, teacher, mode).per_point;
            }
            l_soft = consistency_loss(src.per_point, teacher_feat);
        }
    } else {
        const ad::Tensor lp = ad::log_softmax(model::classify(src.global, student));
        if (config.use_pm) {
            if (!batch.source_soft_labels) throw InvalidArgument("total_loss: use_pm needs PointMixup soft labels");
            l_s = soft_ce_loss(lp, *batch.source_soft_labels);
        } else {
            l_s = ce_loss(lp, batch.source_labels);
        }
        if (config.soft) {
            ad::Tensor teacher_probs;
            {
                ad::NoGradScope no_grad;
                const auto enc = model::encode(teacher_view(batch.teacher_source, batch.source), b, teacher, mode);
                teacher_probs = ad::softmax_rows(model::classify(enc.global, teacher));
            }
            // A diverged teacher surfaces as a non-finite l_soft.
            const auto tp = teacher_probs.data();
            if (std::all_of(tp.begin(), tp.end(), [](double v) { return std::isfinite(v); }))
                l_soft = soft_ce_loss(lp, teacher_probs);
            else
                l_soft = ad::Tensor::scalar(std::numeric_limits<double>::quiet_NaN());
        }
    }

    // Target branch.
    ad::Tensor l_t = zero, l_cons = zero;
    if (config.recon || config.cons) {
        if (batch.target.numel() != batch.source.numel())
            throw InvalidArgument("total_loss: source and target batches differ in size");
        const model::Encoding tgt = model::encode(batch.target, b, student, mode);
        if (config.recon) l_t = recon_loss(model::decode(tgt.global, student), batch.target, b);
        if (config.cons) {
            ad::Tensor teacher_feat;
            {
                ad::NoGradScope no_grad;
                const auto enc = model::encode(teacher_view(batch.teacher_target, batch.target), b, teacher, mode);
                teacher_feat = segmentation ? enc.per_point : enc.global;
            }
            l_cons = consistency_loss(segmentation ? tgt.per_point : tgt.global, teacher_feat);
        }
    }

    LossResult r;
    r.total = ad::add(ad::scalar_mul(ad::add(l_s, l_soft), config.lambda), ad::add(l_t, l_cons));
    r.parts.l_s = l_s.item();
    r.parts.l_soft = l_soft.item();
    r.parts.l_t = l_t.item();
    r.parts.l_cons = l_cons.item();
    r.parts.total = r.total.item();
    r.parts.lambda = config.lambda;
    return r;
}

}  // namespace sen::loss
