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

// Acceptance checks, one PASS/FAIL line per criterion. Tolerances and
// experiment sizes are fixed here; `--only 2,3` runs a subset.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sen/augmentation/pointmixup.hpp"
#include "sen/autodiff/ops.hpp"
#include "sen/cli/commands.hpp"
#include "sen/cli/gradcheck_suite.hpp"
#include "sen/cli/report.hpp"
#include "sen/common/binary_io.hpp"
#include "sen/common/rng.hpp"
#include "sen/data_synth/dataset.hpp"
#include "sen/losses/losses.hpp"
#include "sen/mean_teacher/ema.hpp"
#include "sen/pointcloud/chamfer.hpp"
#include "sen/trainer/metrics.hpp"
#include "sen/trainer/trainer.hpp"

namespace {

using namespace sen;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Gradient fidelity.
constexpr std::size_t kGradCases = 50;
constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 300.0;
// Chamfer oracle.
constexpr std::size_t kChamferPairs = 200;
constexpr std::size_t kChamferMaxPoints = 32;
// EMA law.
constexpr std::size_t kEmaSteps = 100;
constexpr double kEmaTolerance = 1e-12;
// PointMixup.
constexpr std::size_t kMixDraws = 1000;
constexpr double kMixLabelTolerance = 1e-12;
constexpr std::size_t kBetaDraws = 100000;
constexpr double kBetaMeanTolerance = 0.01;
// Loss identities.
constexpr std::size_t kLossSteps = 20;
constexpr double kLossTolerance = 1e-12;
// Classification adaptation.
constexpr std::size_t kClsPerClass = 60;
constexpr std::size_t kClsEpochs = 40;
constexpr double kShiftGap = 0.10;
constexpr double kSenGain = 0.05;
constexpr double kPmSlack = 0.01;
constexpr double kClsSeconds = 900.0;
// Segmentation adaptation.
constexpr std::size_t kSegPerClass = 200;
constexpr std::size_t kSegEpochs = 80;
constexpr double kSegGain = 0.03;
constexpr double kSegSeconds = 900.0;
// Reconstruction.
constexpr std::size_t kAeEpochs = 40;
constexpr double kAeRatio = 0.30;
constexpr double kSenReconSlack = 1.25;

constexpr std::uint64_t kSeeds[] = {0, 1, 2};
constexpr std::uint64_t kSourceDataSeed = 1001;
constexpr std::uint64_t kTargetDataSeed = 2002;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string pct(const std::vector<double>& v) {
    const auto m = cli::mean_sem(v);
    return fmt("%.1f ± %.1f", 100.0 * m.mean, 100.0 * m.sem);
}

pc::PointCloud random_cloud(std::size_t m, Rng& rng) {
    std::vector<double> xyz(3 * m);
    for (double& x : xyz) x = rng.uniform(-1.0, 1.0);
    return pc::PointCloud(std::move(xyz));
}

// ---- 1 -----------------------------------------------------------------

Outcome gradient_fidelity() {
    const auto t0 = Clock::now();
    ad::GradCheckOptions opt;
    opt.tolerance = kGradTolerance;
    auto entries = cli::gradcheck_primitives(7, kGradCases, opt);
    for (auto& e : cli::gradcheck_tiny_model(7, opt)) entries.push_back(std::move(e));
    double worst = 0.0;
    std::size_t checked = 0, failed = 0;
    std::string worst_name;
    for (const auto& e : entries) {
        checked += e.report.checked;
        failed += e.report.failed + (e.report.checked == 0 ? 1 : 0);
        if (e.report.max_rel_error >= worst) worst = e.report.max_rel_error, worst_name = e.name;
    }
    const double secs = seconds_since(t0);
    return {failed == 0 && worst < kGradTolerance && secs < kGradSeconds,
            fmt("%zu checks, max rel error %.2e (%s), %.0f s", checked, worst, worst_name.c_str(), secs)};
}

// ---- 2 -----------------------------------------------------------------

double chamfer_oracle(const pc::PointCloud& a, const pc::PointCloud& b) {
    __float128 sum = 0;
    auto side = [&](const pc::PointCloud& x, const pc::PointCloud& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            double best = INFINITY;
            for (std::size_t j = 0; j < y.size(); ++j) best = std::min(best, pc::squared_distance(x.point(i), y.point(j)));
            sum += best;
        }
    };
    side(a, b);
    side(b, a);
    return static_cast<double>(sum);
}

Outcome chamfer_equivalence() {
    Rng rng(2);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < kChamferPairs; ++t) {
        const auto a = random_cloud(1 + rng.index(kChamferMaxPoints), rng);
        const auto b = random_cloud(1 + rng.index(kChamferMaxPoints), rng);
        const double d = pc::chamfer_distance(a, b);
        auto perm_a = rng.permutation(a.size());
        auto perm_b = rng.permutation(b.size());
        const bool ok = d == chamfer_oracle(a, b) && d == pc::chamfer_distance(b, a) &&
                        d == pc::chamfer_distance(a.subset(perm_a), b.subset(perm_b)) &&
                        pc::chamfer_distance(a, a.subset(perm_a)) == 0.0 && d > 0.0;
        // Duplicating points keeps the set, and the distance, at zero.
        std::vector<std::size_t> dup(perm_a);
        dup.push_back(perm_a.front());
        bad += ok && pc::chamfer_distance(a, a.subset(dup)) == 0.0 ? 0 : 1;
    }
    return {bad == 0, fmt("%zu pairs, %zu mismatches", kChamferPairs, bad)};
}

// ---- 3 -----------------------------------------------------------------

Outcome ema_law() {
    const model::ModelParams student(model::Arch::tiny(), 1);
    model::ModelParams teacher = mt::init_teacher(model::ModelParams(model::Arch::tiny(), 2));
    const model::ModelParams teacher0 = teacher;
    const double alpha = 0.9;
    mt::EmaState state{alpha, 0, false};
    double worst = 0.0;
    for (std::size_t t = 1; t <= kEmaSteps; ++t) {
        mt::ema_update(teacher, student, state);
        const double f = std::pow(alpha, static_cast<double>(t));
        for (std::size_t i = 0; i < student.parameters().size(); ++i)
            for (std::size_t j = 0; j < student.parameters()[i].value.numel(); ++j) {
                const double s = student.parameters()[i].value[j];
                const double gap = std::abs(teacher.parameters()[i].value[j] - s);
                worst = std::max(worst, std::abs(gap - f * std::abs(teacher0.parameters()[i].value[j] - s)));
            }
    }
    model::ModelParams copy = teacher0;
    mt::EmaState zero{0.0, 0, false};
    mt::ema_update(copy, student, zero);
    bool exact = true;
    for (std::size_t i = 0; i < student.parameters().size(); ++i)
        for (std::size_t j = 0; j < student.parameters()[i].value.numel(); ++j)
            exact = exact && copy.parameters()[i].value[j] == student.parameters()[i].value[j];
    return {worst <= kEmaTolerance && exact,
            fmt("max deviation %.1e over %zu steps, alpha=0 exact: %s", worst, kEmaSteps, exact ? "yes" : "no")};
}

// ---- 4 -----------------------------------------------------------------

Outcome pointmixup_properties() {
    Rng rng(4);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < kMixDraws; ++t) {
        const std::size_t m = 1 + rng.index(128), classes = 2 + rng.index(9);
        const double gamma = rng.uniform();
        const auto a = random_cloud(m, rng), b = random_cloud(m, rng);
        const auto s = aug::pointmixup(a, rng.index(classes), b, rng.index(classes), gamma, classes, rng.engine()());
        double sum = 0.0;
        std::size_t support = 0;
        for (double v : s.soft_label) sum += v, support += v != 0.0 ? 1 : 0;
        if (s.cloud.size() != m || std::abs(sum - 1.0) > kMixLabelTolerance || support > 2) ++bad;
    }
    const auto a = random_cloud(32, rng), b = random_cloud(32, rng);
    const auto g0 = aug::pointmixup(a, 0, b, 1, 0.0, 2, 1);
    const auto g1 = aug::pointmixup(a, 0, b, 1, 1.0, 2, 1);
    const bool degenerate = pc::chamfer_distance(g0.cloud, a) == 0.0 && g0.soft_label[0] == 1.0 &&
                            pc::chamfer_distance(g1.cloud, b) == 0.0 && g1.soft_label[1] == 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < kBetaDraws; ++i) sum += aug::sample_gamma(0.2, rng);
    const double beta_mean = sum / static_cast<double>(kBetaDraws);
    return {bad == 0 && degenerate && std::abs(beta_mean - 0.5) <= kBetaMeanTolerance,
            fmt("%zu/%zu draws violate, gamma 0/1 degenerate: %s, Beta(0.2,0.2) mean %.4f", bad, kMixDraws,
                degenerate ? "yes" : "no", beta_mean)};
}

// ---- 5 -----------------------------------------------------------------

Outcome loss_identities() {
    Rng rng(5);
    double worst_decomp = 0.0, worst_onehot = 0.0, cons_at_init = 0.0, teacher_grad = 0.0;
    for (Task task : {Task::classification, Task::segmentation}) {
        for (bool pm : {false, true}) {
            if (pm && task == Task::segmentation) continue;
            model::ModelParams student(model::Arch::desk(task, 3, 32), 3);
            model::ModelParams teacher = mt::init_teacher(student);
            train::AdamState adam = train::AdamState::for_parameters(student.parameters());
            mt::EmaState ema;
            loss::LossConfig cfg;
            cfg.task = task;
            cfg.use_pm = pm;
            cfg.lambda = task == Task::classification ? 0.2 : 0.05;
            for (std::size_t step = 0; step < kLossSteps; ++step) {
                std::vector<pc::PointCloud> xs, xt;
                std::vector<std::size_t> labels;
                std::vector<double> soft;
                for (int i = 0; i < 4; ++i) {
                    xs.push_back(random_cloud(32, rng));
                    xt.push_back(random_cloud(32, rng));
                    const std::size_t n = task == Task::classification ? 1 : 32;
                    for (std::size_t p = 0; p < n; ++p) labels.push_back(rng.index(3));
                    const double g = rng.uniform();
                    soft.insert(soft.end(), {g, 1.0 - g, 0.0});
                }
                auto batch = loss::DomainBatch::make(xs, labels, xt);
                if (pm) batch.source_soft_labels = ad::Tensor({4, 3}, soft);
                student.zero_grad();
                teacher.zero_grad();
                ad::Tape tape;
                ad::TapeScope scope(tape);
                const auto r = loss::total_loss(batch, student, teacher, cfg);
                if (step == 0) cons_at_init = std::max(cons_at_init, r.parts.l_cons);
                worst_decomp = std::max(worst_decomp, std::abs(r.parts.total - r.parts.recombined()));
                worst_decomp = std::max(worst_decomp, std::abs(r.parts.total - r.total.item()));
                tape.backward(r.total);
                for (const auto& p : teacher.parameters())
                    for (double g : p.grad.data()) teacher_grad = std::max(teacher_grad, std::abs(g));
                train::adam_step(student.parameters(), adam, 1e-3);
                mt::ema_update(teacher, student, ema);
            }
        }
    }
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.index(8), c = 2 + rng.index(10);
        std::vector<double> logits(n * c), onehot(n * c, 0.0);
        std::vector<std::size_t> labels(n);
        for (double& v : logits) v = rng.uniform(-5.0, 5.0);
        for (std::size_t i = 0; i < n; ++i) labels[i] = rng.index(c), onehot[i * c + labels[i]] = 1.0;
        const auto lp = ad::log_softmax(ad::Tensor({n, c}, logits));
        worst_onehot = std::max(worst_onehot, std::abs(loss::soft_ce_loss(lp, ad::Tensor({n, c}, onehot)).item() -
                                                       loss::ce_loss(lp, labels).item()));
    }
    return {worst_decomp <= kLossTolerance && worst_onehot <= kLossTolerance && cons_at_init == 0.0 &&
                teacher_grad == 0.0,
            fmt("decomposition %.1e, one-hot %.1e, cons at init %g, max |teacher grad| %g", worst_decomp,
                worst_onehot, cons_at_init, teacher_grad)};
}

// ---- 6, 7, 9 -----------------------------------------------------------

struct DomainData {
    synth::DatasetSplits source, target;
};

DomainData make_domains(Task task, std::size_t per_class) {
    synth::BuildOptions opt;
    opt.task = task;
    opt.per_class = per_class;
    opt.m_final = 64;
    const auto shapes = task == Task::classification ? synth::default_classes() : synth::default_part_shapes();
    opt.seed = kSourceDataSeed;
    DomainData d{synth::build_dataset(shapes, synth::DomainProfile::clean(), opt), {}};
    opt.seed = kTargetDataSeed;
    d.target = synth::build_dataset(shapes, synth::DomainProfile::scanned(), opt);
    return d;
}

struct RunResult {
    double target = 0.0;  // final student metric on the target test split
    double source = 0.0;  // same model on the source test split
    double l_t = 0.0;     // final epoch mean target Chamfer
    double first_l_t = 0.0;
};

RunResult run(const DomainData& d, train::TrainConfig cfg) {
    auto r = train::train(cfg, d.source.train, d.target.train, &d.target.test);
    return {r.epochs.back().student_metric, train::evaluate(r.student, d.source.test), r.epochs.back().loss.l_t,
            r.epochs.front().loss.l_t};
}

struct ClassificationRuns {
    std::vector<RunResult> source_only, sen, sen_pm;
    double seconds = 0.0;
};

const ClassificationRuns& classification_runs() {
    static const ClassificationRuns runs = [] {
        const auto t0 = Clock::now();
        const DomainData d = make_domains(Task::classification, kClsPerClass);
        ClassificationRuns out;
        for (auto seed : kSeeds) {
            auto cfg = train::TrainConfig::defaults(Task::classification);
            cfg.epochs = kClsEpochs;
            cfg.seed = seed;
            cfg.method = train::Method::source_only;
            out.source_only.push_back(run(d, cfg));
            cfg.method = train::Method::sen;
            out.sen.push_back(run(d, cfg));
            cfg.use_pm = true;
            out.sen_pm.push_back(run(d, cfg));
        }
        out.seconds = seconds_since(t0);
        return out;
    }();
    return runs;
}

std::vector<double> field(const std::vector<RunResult>& rs, double RunResult::*f) {
    std::vector<double> out;
    for (const auto& r : rs) out.push_back(r.*f);
    return out;
}

Outcome classification_adaptation() {
    const auto& r = classification_runs();
    const auto so_tgt = field(r.source_only, &RunResult::target);
    const auto so_src = field(r.source_only, &RunResult::source);
    const auto sen = field(r.sen, &RunResult::target);
    const auto pm = field(r.sen_pm, &RunResult::target);
    const bool a = mean(so_src) - mean(so_tgt) >= kShiftGap;
    const bool b = mean(sen) - mean(so_tgt) >= kSenGain;
    const bool c = mean(pm) >= mean(sen) - kPmSlack;
    const bool t = r.seconds < kClsSeconds;
    return {a && b && c && t,
            fmt("(a) %s source-only: source %s vs target %s; (b) %s SEN %s vs source-only %s; (c) %s SEN+PM %s; "
                "(time) %s %.0f s",
                a ? "ok" : "FAIL", pct(so_src).c_str(), pct(so_tgt).c_str(), b ? "ok" : "FAIL", pct(sen).c_str(),
                pct(so_tgt).c_str(), c ? "ok" : "FAIL", pct(pm).c_str(), t ? "ok" : "FAIL", r.seconds)};
}

Outcome segmentation_adaptation() {
    const auto t0 = Clock::now();
    const DomainData d = make_domains(Task::segmentation, kSegPerClass);
    std::vector<double> so, sen;
    for (auto seed : kSeeds) {
        auto cfg = train::TrainConfig::defaults(Task::segmentation);
        cfg.epochs = kSegEpochs;
        cfg.seed = seed;
        cfg.method = train::Method::source_only;
        so.push_back(run(d, cfg).target);
        cfg.method = train::Method::sen;
        sen.push_back(run(d, cfg).target);
    }
    const double secs = seconds_since(t0);
    return {mean(sen) - mean(so) >= kSegGain && secs < kSegSeconds,
            fmt("target mIoU SEN %s vs source-only %s, %.0f s", pct(sen).c_str(), pct(so).c_str(), secs)};
}

Outcome reconstruction_sanity() {
    const DomainData d = make_domains(Task::classification, kClsPerClass);
    std::vector<double> first, last;
    for (auto seed : kSeeds) {
        auto cfg = train::TrainConfig::defaults(Task::classification);
        cfg.epochs = kAeEpochs;
        cfg.seed = seed;
        cfg.lambda = 0.0;
        cfg.cons = false;
        const RunResult r = run(d, cfg);
        first.push_back(r.first_l_t);
        last.push_back(r.l_t);
    }
    const double ratio = mean(last) / mean(first);
    const double sen_final = mean(field(classification_runs().sen, &RunResult::l_t));
    const bool a = ratio <= kAeRatio;
    const bool b = sen_final <= mean(last) * kSenReconSlack;
    return {a && b, fmt("autoencoder Chamfer %.3f -> %.3f (ratio %.3f) %s; SEN final %.3f vs bound %.3f %s",
                        mean(first), mean(last), ratio, a ? "ok" : "FAIL", sen_final, mean(last) * kSenReconSlack,
                        b ? "ok" : "FAIL")};
}

// ---- 8 -----------------------------------------------------------------

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "sen_acceptance_determinism";
    fs::remove_all(root);
    auto invoke = [](std::vector<std::string> args) {
        std::vector<const char*> argv{"sen"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    };
    bool ok = invoke({"gen-data", "--out", root.string(), "--per-class", "10", "--seed", "8"}) == cli::kOk;
    std::size_t compared = 0, differing = 0;
    for (const char* mode : {"classification", "segmentation"}) {
        const fs::path data = root / mode;
        ok = ok && invoke({"gen-data", "--out", data.string(), "--mode", mode, "--per-class", "10"}) == cli::kOk;
        for (const char* run : {"a", "b"})
            ok = ok && invoke({"train", "--source", (data / "source_train.pcds").string(), "--target",
                               (data / "target_train.pcds").string(), "--out", (data / run).string(), "--mode", mode,
                               "--epochs", "3", "--batch-size", "4", "--pm", "--seed", "21", "--quiet"}) == cli::kOk;
        for (const char* f : {"metrics.csv", "student.senc", "teacher.senc"}) {
            if (!ok) break;
            ++compared;
            differing += io::read_file(data / "a" / f) != io::read_file(data / "b" / f) ? 1 : 0;
        }
    }
    fs::remove_all(root);
    return {ok && compared == 6 && differing == 0,
            fmt("%zu file pairs compared, %zu differ%s", compared, differing, ok ? "" : ", a command failed")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for sen"};
    std::vector<int> only;
    app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "gradient fidelity", gradient_fidelity},
        {2, "chamfer oracle equivalence", chamfer_equivalence},
        {3, "EMA law", ema_law},
        {4, "PointMixup properties", pointmixup_properties},
        {5, "loss identities", loss_identities},
        {6, "classification adaptation", classification_adaptation},
        {7, "segmentation adaptation", segmentation_adaptation},
        {8, "determinism", determinism},
        {9, "reconstruction sanity", reconstruction_sanity},
    };
    const std::set<int> wanted(only.begin(), only.end());
    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.contains(c.id)) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
