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

#include "sen/trainer/trainer.hpp"

#include <charconv>
#include <cmath>

#include "sen/augmentation/pointmixup.hpp"
#include "sen/autodiff/tape.hpp"
#include "sen/common/error.hpp"
#include "sen/common/heap.hpp"
#include "sen/common/rng.hpp"
#include "sen/pointcloud/transforms.hpp"
#include "sen/trainer/metrics.hpp"

namespace sen::train {

namespace {

enum Stream : std::uint64_t { kInit = 1, kShuffle = 2, kJitter = 3, kMix = 4, kMixFps = 5 };

void check_dataset(const synth::Dataset& d, const TrainConfig& cfg, const char* what) {
    if (d.size() == 0) throw InvalidArgument(std::string("train: ") + what + " dataset is empty");
    d.validate();
    if (d.task != cfg.mode) throw InvalidArgument(std::string("train: ") + what + " dataset has the wrong task");
    if (d.points != cfg.points)
        throw InvalidArgument(std::string("train: ") + what + " dataset has " + std::to_string(d.points) +
                              " points per cloud, config expects " + std::to_string(cfg.points));
}

loss::LossConfig loss_config(const TrainConfig& cfg) {
    loss::LossConfig lc;
    lc.task = cfg.mode;
    if (cfg.method == Method::source_only) {
        lc.lambda = 1.0;
        lc.soft = lc.recon = lc.cons = false;
    } else {
        lc.lambda = cfg.lambda;
        lc.soft = cfg.soft;
        lc.recon = cfg.recon;
        lc.cons = cfg.cons;
    }
    lc.use_pm = cfg.use_pm && cfg.mode == Task::classification;
    return lc;
}

void require_finite(const loss::LossBreakdown& b, std::size_t epoch, std::size_t step) {
    const std::pair<const char*, double> parts[] = {
        {"l_s", b.l_s}, {"l_soft", b.l_soft}, {"l_t", b.l_t}, {"l_cons", b.l_cons}, {"total", b.total}};
    for (const auto& [name, v] : parts)
        if (!std::isfinite(v))
            throw NumericError("non-finite " + std::string(name) + " (" + std::to_string(v) + ") at epoch " +
                               std::to_string(epoch) + ", step " + std::to_string(step));
}

class Jitterer {
public:
    Jitterer(const TrainConfig& cfg) : cfg_(cfg) {}

    pc::PointCloud operator()(const pc::PointCloud& c) {
        return pc::jitter(c, cfg_.jitter_sigma, cfg_.jitter_clip, derive_seed(cfg_.seed, kJitter, counter_++));
    }

private:
    const TrainConfig& cfg_;
    std::uint64_t counter_ = 0;
};

}  // namespace

TrainReport train(const TrainConfig& cfg, const synth::Dataset& source, const synth::Dataset& target,
                  const synth::Dataset* eval, const EpochCallback& on_epoch) {
    cfg.validate();
    retain_heap_memory();
    check_dataset(source, cfg, "source");
    check_dataset(target, cfg, "target");
    if (target.num_classes != source.num_classes)
        throw InvalidArgument("train: source and target label spaces differ");
    const synth::Dataset& eval_set = eval ? *eval : target;
    check_dataset(eval_set, cfg, "evaluation");

    const std::size_t b = cfg.batch_size;
    const std::size_t steps = std::min(source.size(), target.size()) / b;
    if (steps == 0)
        throw InvalidArgument("train: batch size " + std::to_string(b) + " exceeds the smaller dataset (" +
                              std::to_string(std::min(source.size(), target.size())) + ")");

    model::Arch arch = model::Arch::desk(cfg.mode, source.num_classes, cfg.points);
    arch.k = cfg.k;
    model::ModelParams student(arch, derive_seed(cfg.seed, kInit));
    TrainReport report{cfg, {}, student, mt::init_teacher(student), mt::EmaState{cfg.ema_momentum, 0, cfg.ema_warmup},
                       AdamState::for_parameters(student.parameters())};
    auto& st = report.student;
    auto& te = report.teacher;

    const loss::LossConfig lc = loss_config(cfg);
    const bool seg = cfg.mode == Task::segmentation;
    const std::size_t m = cfg.points;
    Rng shuffle(derive_seed(cfg.seed, kShuffle));
    Rng mix(derive_seed(cfg.seed, kMix));
    Jitterer jit(cfg);
    std::uint64_t mix_counter = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double lr = cosine_lr(epoch - 1, cfg.epochs, cfg.lr0, cfg.lr_min);
        const auto perm_s = shuffle.permutation(source.size());
        const auto perm_t = shuffle.permutation(target.size());
        loss::LossBreakdown sum;

        for (std::size_t step = 0; step < steps; ++step) {
            std::vector<pc::PointCloud> xs, xt, xs_teacher, xt_teacher;
            std::vector<std::size_t> labels;
            for (std::size_t i = 0; i < b; ++i) {
                const std::size_t si = perm_s[step * b + i], ti = perm_t[step * b + i];
                xs.push_back(jit(source.clouds[si]));
                xt.push_back(jit(target.clouds[ti]));
                if (seg) {
                    const auto parts = source.part_labels(si);
                    labels.insert(labels.end(), parts.begin(), parts.end());
                } else {
                    labels.push_back(source.labels[si]);
                }
            }

            std::optional<ad::Tensor> soft_labels;
            if (cfg.use_pm) {
                // Each sample is mixed with a partner from a shuffled copy of the batch.
                const auto partner = mix.permutation(b);
                std::vector<pc::PointCloud> mixed;
                std::vector<std::size_t> mixed_labels;
                std::vector<double> soft;
                for (std::size_t i = 0; i < b; ++i) {
                    const std::size_t j = partner[i];
                    const double gamma = aug::sample_gamma(cfg.pm_alpha, mix);
                    const auto fps_seed = derive_seed(cfg.seed, kMixFps, mix_counter++);
                    if (seg) {
                        auto mp = aug::pointmixup_parts(xs[i], std::span(labels).subspan(i * m, m), xs[j],
                                                        std::span(labels).subspan(j * m, m), gamma, fps_seed);
                        mixed.push_back(std::move(mp.cloud));
                        mixed_labels.insert(mixed_labels.end(), mp.labels.begin(), mp.labels.end());
                    } else {
                        auto ms = aug::pointmixup(xs[i], labels[i], xs[j], labels[j], gamma, source.num_classes,
                                                  fps_seed);
                        mixed.push_back(std::move(ms.cloud));
                        soft.insert(soft.end(), ms.soft_label.begin(), ms.soft_label.end());
                    }
                }
                xs = std::move(mixed);
                if (seg)
                    labels = std::move(mixed_labels);
                else
                    soft_labels = ad::Tensor({b, source.num_classes}, std::move(soft));
            }

            loss::DomainBatch batch = loss::DomainBatch::make(xs, std::move(labels), xt);
            batch.source_soft_labels = std::move(soft_labels);
            if (cfg.teacher_views) {
                for (const auto& c : xs) xs_teacher.push_back(jit(c));
                for (std::size_t i = 0; i < b; ++i) xt_teacher.push_back(jit(target.clouds[perm_t[step * b + i]]));
                batch.teacher_source = pc::stack_clouds(xs_teacher);
                batch.teacher_target = pc::stack_clouds(xt_teacher);
            }

            st.zero_grad();
            loss::LossResult res;
            {
                ad::Tape tape;
                ad::TapeScope scope(tape);
                res = loss::total_loss(batch, st, te, lc);
                require_finite(res.parts, epoch, step);
                tape.backward(res.total);
            }
            adam_step(st.parameters(), report.adam, lr);
            if (!cfg.freeze_teacher) mt::ema_update(te, st, report.ema);

            sum.l_s += res.parts.l_s;
            sum.l_soft += res.parts.l_soft;
            sum.l_t += res.parts.l_t;
            sum.l_cons += res.parts.l_cons;
            sum.total += res.parts.total;
        }

        const double n = static_cast<double>(steps);
        EpochMetrics em;
        em.epoch = epoch;
        em.loss = {sum.l_s / n, sum.l_soft / n, sum.l_t / n, sum.l_cons / n, sum.total / n, lc.lambda};
        em.lr = lr;
        em.student_metric = evaluate(st, eval_set);
        em.teacher_metric = evaluate(te, eval_set);
        report.epochs.push_back(em);
        if (on_epoch) on_epoch(em);
    }
    return report;
}

std::string metrics_csv_header(Task mode) {
    return mode == Task::classification ? "epoch,l_s,l_soft,l_t,l_cons,total,lr,student_acc,teacher_acc"
                                        : "epoch,l_s,l_soft,l_t,l_cons,total,lr,student_miou,teacher_miou";
}

std::string metrics_csv_row(const EpochMetrics& m) {
    auto num = [](double v) {
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    return std::to_string(m.epoch) + "," + num(m.loss.l_s) + "," + num(m.loss.l_soft) + "," + num(m.loss.l_t) + "," +
           num(m.loss.l_cons) + "," + num(m.loss.total) + "," + num(m.lr) + "," + num(m.student_metric) + "," +
           num(m.teacher_metric);
}

std::string metrics_csv(const TrainReport& report) {
    std::string out = metrics_csv_header(report.config.mode) + "\n";
    for (const auto& e : report.epochs) out += metrics_csv_row(e) + "\n";
    return out;
}

}  // namespace sen::train
