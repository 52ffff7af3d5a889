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

#include "sen/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "sen/cli/config.hpp"
#include "sen/cli/gradcheck_suite.hpp"
#include "sen/cli/report.hpp"
#include "sen/common/binary_io.hpp"
#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"
#include "sen/data_synth/dataset.hpp"
#include "sen/trainer/checkpoint.hpp"
#include "sen/trainer/metrics.hpp"
#include "sen/trainer/trainer.hpp"

namespace sen::cli {

namespace {

namespace fs = std::filesystem;

// Bad flag values that only surface after parsing.
struct UsageError : Error {
    using Error::Error;
};

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// ---- gen-data ----------------------------------------------------------

struct GenDataArgs {
    std::string out;
    std::string mode = "classification";
    std::size_t per_class = 100;
    std::size_t points = 64;
    std::uint64_t seed = 0;
    synth::DomainProfile target = synth::DomainProfile::scanned();
    bool export_csv = false;
};

void add_gen_data(CLI::App& app, GenDataArgs& a) {
    app.add_option("--out", a.out, "Output directory for source_*.pcds and target_*.pcds")->required();
    app.add_option("--mode", a.mode, "classification|segmentation")->capture_default_str();
    app.add_option("--per-class", a.per_class, "Samples per shape class and domain")->capture_default_str();
    app.add_option("--points", a.points, "Points per cloud after sampling")->capture_default_str();
    app.add_option("--seed", a.seed, "Generator seed")->capture_default_str();
    app.add_option("--noise", a.target.noise_sigma, "Target domain Gaussian noise sigma")->capture_default_str();
    app.add_option("--occlusion", a.target.occlusion, "Target domain occluded fraction")->capture_default_str();
    app.add_option("--density", a.target.density_exponent, "Target domain density bias exponent")
        ->capture_default_str();
    app.add_option("--dropout", a.target.dropout, "Target domain random dropout fraction")->capture_default_str();
    app.add_flag("--export-csv", a.export_csv, "Also write sample_id,x,y,z,label CSV dumps");
}

int gen_data(const GenDataArgs& a, std::ostream& out) {
    synth::BuildOptions opt;
    try {
        opt.task = parse_task(a.mode);
        a.target.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    opt.per_class = a.per_class;
    opt.m_final = a.points;
    const bool seg = opt.task == Task::segmentation;
    const auto classes = seg ? synth::default_part_shapes() : synth::default_classes();
    const fs::path dir(a.out);
    const std::pair<const char*, synth::DomainProfile> domains[] = {{"source", synth::DomainProfile::clean()},
                                                                    {"target", a.target}};
    std::uint64_t stream = 0;
    for (const auto& [name, profile] : domains) {
        opt.seed = derive_seed(a.seed, 0x64617461, stream++);
        const auto splits = synth::build_dataset(classes, profile, opt);
        const std::pair<const char*, const synth::Dataset*> parts[] = {
            {"train", &splits.train}, {"val", &splits.val}, {"test", &splits.test}};
        for (const auto& [split, data] : parts) {
            const fs::path file = dir / (std::string(name) + "_" + split + ".pcds");
            synth::write_pcds(*data, file);
            if (a.export_csv) synth::export_csv(*data, fs::path(file).replace_extension(".csv"));
            out << file.string() << ": " << data->size() << " clouds\n";
        }
    }
    return kOk;
}

// ---- train -------------------------------------------------------------

struct ValueFlag {
    const char* flag;
    const char* key;
    const char* help;
};

// Flags that set a TrainConfig key to the given value.
const ValueFlag kValueFlags[] = {
    {"--mode", "mode", "classification|segmentation"},
    {"--method", "method", "sen|source-only"},
    {"--batch-size", "batch_size", "Mini-batch size of each domain"},
    {"--epochs", "epochs", "Training epochs"},
    {"--lr", "lr0", "Initial learning rate"},
    {"--lr-min", "lr_min", "Final cosine-annealed learning rate"},
    {"--lambda", "lambda", "Weight of the source terms in the joint loss"},
    {"--ema-momentum", "ema_momentum", "Teacher EMA momentum"},
    {"--pm-alpha", "pm_alpha", "Beta(alpha, alpha) shape of the PointMixup weight"},
    {"--k", "k", "Neighbours per point in EdgeConv"},
    {"--points", "points", "Points per cloud"},
    {"--seed", "seed", "Training seed"},
    {"--jitter-sigma", "jitter_sigma", "Jitter noise sigma"},
    {"--jitter-clip", "jitter_clip", "Jitter clip"},
};

struct BoolFlag {
    const char* flag;
    const char* key;
    const char* value;
    const char* help;
};

const BoolFlag kBoolFlags[] = {
    {"--pm", "use_pm", "true", "Enable PointMixup on source batches"},
    {"--no-soft", "soft", "false", "Drop the soft-label (segmentation: source consistency) loss"},
    {"--no-recon", "recon", "false", "Drop the target reconstruction loss"},
    {"--no-cons", "cons", "false", "Drop the target consistency loss"},
    {"--no-ema-warmup", "ema_warmup", "false", "Use the fixed EMA momentum from the first step"},
    {"--freeze-teacher", "freeze_teacher", "true", "Keep the teacher at its initial weights"},
    {"--teacher-views", "teacher_views", "true", "Give the teacher independently jittered inputs"},
};

std::string default_text(const std::string& key) {
    const auto cls = train::TrainConfig::defaults(Task::classification).entries();
    const auto seg = train::TrainConfig::defaults(Task::segmentation).entries();
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (cls[i].first != key) continue;
        if (key == "mode" || cls[i].second == seg[i].second) return cls[i].second;
        return cls[i].second + " (classification) / " + seg[i].second + " (segmentation)";
    }
    return {};
}

struct TrainArgs {
    std::string source, target, eval, out, config;
    std::vector<std::string> values = std::vector<std::string>(std::size(kValueFlags));
    std::vector<CLI::Option*> value_opts;
    std::vector<CLI::Option*> bool_opts;
    bool quiet = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
    app.add_option("--source", a.source, "Labelled source PCDS file")->required();
    app.add_option("--target", a.target, "Unlabelled target PCDS file")->required();
    app.add_option("--eval", a.eval, "Labelled PCDS evaluated after each epoch (default: the target file)");
    app.add_option("--out", a.out, "Run directory for metrics.csv, student.senc, teacher.senc, config.txt")
        ->required();
    app.add_option("--config", a.config, "key=value config file; command-line flags take precedence");
    for (std::size_t i = 0; i < std::size(kValueFlags); ++i) {
        const auto& f = kValueFlags[i];
        a.value_opts.push_back(app.add_option(f.flag, a.values[i], f.help)->default_str(default_text(f.key)));
    }
    for (const auto& f : kBoolFlags) a.bool_opts.push_back(app.add_flag(f.flag, f.help));
    app.add_flag("--quiet", a.quiet, "Do not print per-epoch progress");
}

int train_cmd(const TrainArgs& a, std::ostream& out) {
    Overrides ov;
    for (std::size_t i = 0; i < std::size(kValueFlags); ++i)
        if (a.value_opts[i]->count() > 0) ov.emplace_back(kValueFlags[i].key, a.values[i]);
    for (std::size_t i = 0; i < std::size(kBoolFlags); ++i)
        if (a.bool_opts[i]->count() > 0) ov.emplace_back(kBoolFlags[i].key, kBoolFlags[i].value);
    train::TrainConfig cfg;
    try {
        cfg = resolve_train_config(a.config.empty() ? std::nullopt : std::optional<fs::path>(a.config), ov);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }

    const auto source = synth::read_pcds(a.source);
    const auto target = synth::read_pcds(a.target);
    std::optional<synth::Dataset> eval;
    if (!a.eval.empty()) eval = synth::read_pcds(a.eval);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    io::write_file(dir / "config.txt", cfg.to_text());

    const char* metric = cfg.mode == Task::classification ? "acc" : "miou";
    auto progress = [&](const train::EpochMetrics& m) {
        if (a.quiet) return;
        out << "epoch " << m.epoch << "/" << cfg.epochs << "  total " << fixed(m.loss.total, 5) << "  student_"
            << metric << " " << fixed(m.student_metric, 4) << "  teacher_" << metric << " "
            << fixed(m.teacher_metric, 4) << std::endl;
    };
    const auto report = train::train(cfg, source, target, eval ? &*eval : nullptr, progress);

    io::write_file(dir / "metrics.csv", train::metrics_csv(report));
    train::save_checkpoint(dir / "student.senc", report.student, cfg.digest(), &report.ema, &report.adam);
    train::save_checkpoint(dir / "teacher.senc", report.teacher, cfg.digest(), &report.ema);
    out << "wrote " << (dir / "metrics.csv").string() << ", student.senc, teacher.senc\n";
    return kOk;
}

// ---- eval --------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint, data;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
    auto ck = train::load_checkpoint(a.checkpoint);
    const auto data = synth::read_pcds(a.data);
    const double v = train::evaluate(ck.model, data);
    out << (data.task == Task::classification ? "accuracy " : "miou ") << fixed(v, 6) << "\n";
    return kOk;
}

// ---- gradcheck ---------------------------------------------------------

struct GradcheckArgs {
    std::uint64_t seed = 0;
    std::size_t cases = 50;
    double tolerance = 1e-4;
};

int gradcheck_cmd(const GradcheckArgs& a, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    ad::GradCheckOptions opt;
    opt.tolerance = a.tolerance;
    auto entries = gradcheck_primitives(a.seed, a.cases, opt);
    for (auto& e : gradcheck_tiny_model(a.seed, opt)) entries.push_back(std::move(e));
    bool ok = true;
    for (const auto& e : entries) {
        const bool pass = e.report.passed() && e.report.checked > 0;
        ok = ok && pass;
        char line[160];
        std::snprintf(line, sizeof line, "%-26s cases %3zu  checked %6zu  skipped %4zu  max_rel %.3e  %s\n",
                      e.name.c_str(), e.cases, e.report.checked, e.report.skipped, e.report.max_rel_error,
                      pass ? "PASS" : "FAIL");
        out << line;
        for (const auto& f : e.report.failures) out << "    " << f << "\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << (ok ? "gradcheck passed" : "gradcheck FAILED") << " in " << fixed(secs, 1) << " s\n";
    return ok ? kOk : kNumericError;
}

// ---- report ------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> csvs;
    std::string out;
    std::string column;
};

std::string run_label(const fs::path& p) {
    if (p.stem() == "metrics" && p.has_parent_path() && !p.parent_path().filename().empty())
        return p.parent_path().filename().string();
    return p.stem().string();
}

int report_cmd(const ReportArgs& a, std::ostream& out) {
    std::vector<MetricsTable> runs;
    for (const auto& f : a.csvs) {
        auto t = read_metrics_csv(f);
        t.label = run_label(f);
        runs.push_back(std::move(t));
    }
    const std::string column = a.column.empty() ? runs.front().header[runs.front().header.size() - 2] : a.column;
    const std::string table = summary_table(runs);
    out << table;
    if (!a.out.empty()) {
        const fs::path dir(a.out);
        io::write_file(dir / "summary.txt", table);
        io::write_file(dir / "learning_curve.svg", render_svg(runs, column));
        out << "wrote " << (dir / "summary.txt").string() << " and " << (dir / "learning_curve.svg").string()
            << "\n";
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"sen: self-ensembling domain adaptation on point clouds"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate synthetic source/target datasets");
    add_gen_data(*gen_cmd, gen);

    TrainArgs tr;
    auto* train_app = app.add_subcommand("train", "Train on a source/target PCDS pair");
    add_train(*train_app, tr);

    EvalArgs ev;
    auto* eval_app = app.add_subcommand("eval", "Evaluate a checkpoint on a labelled PCDS file");
    eval_app->add_option("--checkpoint", ev.checkpoint, "SENC checkpoint")->required();
    eval_app->add_option("--data", ev.data, "Labelled PCDS file")->required();

    GradcheckArgs gc;
    auto* gc_app = app.add_subcommand("gradcheck", "Finite-difference check of every primitive and the joint loss");
    gc_app->add_option("--seed", gc.seed, "Seed for the random cases")->capture_default_str();
    gc_app->add_option("--cases", gc.cases, "Random cases per primitive")->capture_default_str();
    gc_app->add_option("--tolerance", gc.tolerance, "Maximum relative error")->capture_default_str();

    ReportArgs rp;
    auto* rp_app = app.add_subcommand("report", "Summarize metrics CSVs (mean ± SEM) and plot learning curves");
    rp_app->add_option("csv", rp.csvs, "metrics.csv files, one per seed run")->required();
    rp_app->add_option("--out", rp.out, "Directory for summary.txt and learning_curve.svg");
    rp_app->add_option("--column", rp.column, "Column to plot (default: student metric)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (gen_cmd->parsed()) return gen_data(gen, out);
        if (train_app->parsed()) return train_cmd(tr, out);
        if (eval_app->parsed()) return eval_cmd(ev, out);
        if (gc_app->parsed()) return gradcheck_cmd(gc, out);
        if (rp_app->parsed()) return report_cmd(rp, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace sen::cli
