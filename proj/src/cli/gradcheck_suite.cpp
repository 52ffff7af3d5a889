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

#include "sen/cli/gradcheck_suite.hpp"

#include <algorithm>

#include "sen/augmentation/pointmixup.hpp"
#include "sen/autodiff/ops.hpp"
#include "sen/autodiff/tape.hpp"
#include "sen/common/rng.hpp"
#include "sen/losses/losses.hpp"
#include "sen/mean_teacher/ema.hpp"
#include "sen/models/params.hpp"

namespace sen::cli {

namespace {

ad::Tensor random_tensor(Rng& rng, ad::Shape shape, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(ad::numel(shape));
    for (double& x : v) x = rng.uniform(lo, hi);
    return ad::Tensor(std::move(shape), std::move(v));
}

pc::PointCloud random_cloud(Rng& rng, std::size_t m) {
    std::vector<double> xyz(3 * m);
    for (double& x : xyz) x = rng.uniform(-1.0, 1.0);
    return pc::PointCloud(std::move(xyz));
}

std::size_t dim(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.index(hi - lo + 1); }

ad::Shape random_shape(Rng& rng, std::size_t min_rank, std::size_t max_rank) {
    ad::Shape s(dim(rng, min_rank, max_rank));
    for (auto& d : s) d = dim(rng, 1, 4);
    return s;
}

void merge(ad::GradCheckReport& into, const ad::GradCheckReport& r, const std::string& tag) {
    into.max_rel_error = std::max(into.max_rel_error, r.max_rel_error);
    into.checked += r.checked;
    into.skipped += r.skipped;
    into.failed += r.failed;
    for (const auto& f : r.failures)
        if (into.failures.size() < 8) into.failures.push_back(tag + ": " + f);
    for (const auto& p : r.params) into.params.push_back(p);
}

struct Case {
    std::vector<ad::Tensor> inputs;
    ad::OpArgs args;
};

Case make_case(ad::OpKind kind, Rng& rng) {
    using ad::OpKind;
    Case c;
    switch (kind) {
        case OpKind::matmul: {
            const auto n = dim(rng, 1, 4), k = dim(rng, 1, 4), m = dim(rng, 1, 4);
            c.inputs = {random_tensor(rng, {n, k}), random_tensor(rng, {k, m})};
            break;
        }
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul_elementwise: {
            const auto s = random_shape(rng, 1, 3);
            c.inputs = {random_tensor(rng, s), random_tensor(rng, s)};
            break;
        }
        case OpKind::concat_last_axis: {
            auto a = random_shape(rng, 1, 3);
            auto b = a;
            b.back() = dim(rng, 1, 4);
            c.inputs = {random_tensor(rng, a), random_tensor(rng, b)};
            break;
        }
        case OpKind::scalar_mul:
            c.inputs = {random_tensor(rng, random_shape(rng, 1, 3))};
            c.args.scalar = rng.uniform(-2.0, 2.0);
            break;
        case OpKind::leaky_relu:
            c.args.slope = rng.uniform(0.0, 0.5);
            [[fallthrough]];
        case OpKind::relu:
        case OpKind::square:
        case OpKind::reduce_sum:
            c.inputs = {random_tensor(rng, random_shape(rng, 1, 3))};
            break;
        case OpKind::reduce_max_over_axis:
        case OpKind::reduce_mean_over_axis: {
            const auto s = random_shape(rng, 2, 3);
            c.args.axis = rng.index(s.size());
            c.inputs = {random_tensor(rng, s)};
            break;
        }
        case OpKind::log_softmax:
            c.inputs = {random_tensor(rng, {dim(rng, 1, 4), dim(rng, 2, 5)}, -3.0, 3.0)};
            break;
        case OpKind::gather_rows: {
            auto s = random_shape(rng, 1, 3);
            c.inputs = {random_tensor(rng, s)};
            c.args.indices.resize(dim(rng, 1, 6));
            for (auto& i : c.args.indices) i = rng.index(s[0]);
            break;
        }
        case OpKind::broadcast_rows: {
            const auto f = dim(rng, 1, 4);
            c.inputs = {random_tensor(rng, rng.uniform() < 0.5 ? ad::Shape{f} : ad::Shape{1, f})};
            c.args.count = dim(rng, 1, 4);
            break;
        }
        case OpKind::reshape: {
            const auto a = dim(rng, 1, 4), b = dim(rng, 1, 4), d = dim(rng, 1, 3);
            c.inputs = {random_tensor(rng, {a * b, d})};
            c.args.shape = rng.uniform() < 0.5 ? ad::Shape{a, b * d} : ad::Shape{a, b, d};
            break;
        }
    }
    return c;
}

ad::GradCheckReport check_loss(const std::function<ad::Tensor()>& loss, std::vector<ad::Parameter*> params,
                               const ad::GradCheckOptions& options) {
    return ad::finite_difference_check(loss, params, options);
}

}  // namespace

std::vector<SuiteEntry> gradcheck_primitives(std::uint64_t seed, std::size_t cases,
                                             const ad::GradCheckOptions& options) {
    std::vector<SuiteEntry> out;
    std::uint64_t op_index = 0;
    for (const auto kind : ad::kAllOps) {
        Rng rng(derive_seed(seed, 0x6763, op_index++));
        SuiteEntry e{std::string(ad::op_name(kind)), cases, {}};
        for (std::size_t n = 0; n < cases; ++n) {
            Case c = make_case(kind, rng);
            std::vector<ad::Parameter> params;
            for (std::size_t i = 0; i < c.inputs.size(); ++i)
                params.emplace_back("x" + std::to_string(i), c.inputs[i]);
            ad::Tensor probe;
            {
                ad::NoGradScope no_grad;
                probe = ad::apply_primitive(kind, c.inputs, c.args);
            }
            const ad::Tensor w = random_tensor(rng, probe.shape());
            auto loss = [&] {
                std::vector<ad::Tensor> xs;
                for (auto& p : params) xs.push_back(ad::use(p));
                return ad::reduce_sum(ad::mul(ad::apply_primitive(kind, xs, c.args), w));
            };
            std::vector<ad::Parameter*> ptrs;
            for (auto& p : params) ptrs.push_back(&p);
            merge(e.report, check_loss(loss, ptrs, options), e.name + " case " + std::to_string(n));
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SuiteEntry> gradcheck_tiny_model(std::uint64_t seed, const ad::GradCheckOptions& options) {
    std::vector<SuiteEntry> out;
    const std::size_t b = 2;
    for (const auto task : {Task::classification, Task::segmentation}) {
        for (const bool pm : {false, true}) {
            if (task == Task::segmentation && pm) continue;
            Rng rng(derive_seed(seed, task == Task::classification ? 1 : 2, pm ? 1 : 0));
            const auto arch = model::Arch::tiny(task);
            model::ModelParams student(arch, rng.engine()());
            model::ModelParams teacher = mt::init_teacher(student);
            // Move the teacher off the student so the consistency terms are non-trivial.
            for (auto& p : teacher.parameters())
                for (double& v : p.value.mutable_data()) v += rng.uniform(-0.05, 0.05);

            std::vector<pc::PointCloud> src, tgt;
            std::vector<std::size_t> labels;
            for (std::size_t i = 0; i < b; ++i) {
                src.push_back(random_cloud(rng, arch.points));
                tgt.push_back(random_cloud(rng, arch.points));
                const std::size_t n_labels = task == Task::classification ? 1 : arch.points;
                for (std::size_t j = 0; j < n_labels; ++j) labels.push_back(rng.index(arch.num_classes));
            }
            auto batch = loss::DomainBatch::make(src, labels, tgt);
            loss::LossConfig lc;
            lc.task = task;
            lc.lambda = task == Task::classification ? 0.2 : 0.05;
            if (pm) {
                std::vector<double> soft;
                for (std::size_t i = 0; i < b; ++i) {
                    const auto mixed = aug::pointmixup(src[i], labels[i], src[(i + 1) % b], labels[(i + 1) % b],
                                                       0.3, arch.num_classes, rng.engine()());
                    soft.insert(soft.end(), mixed.soft_label.begin(), mixed.soft_label.end());
                }
                batch.source_soft_labels = ad::Tensor({b, arch.num_classes}, soft);
                lc.use_pm = true;
            }
            auto loss = [&] { return loss::total_loss(batch, student, teacher, lc).total; };
            std::string name = std::string("total_loss/") + std::string(task_name(task)) + (pm ? "+pm" : "");
            SuiteEntry e{name, 1, {}};
            merge(e.report, check_loss(loss, student.parameter_ptrs(), options), name);
            out.push_back(std::move(e));
        }
    }
    return out;
}

}  // namespace sen::cli
