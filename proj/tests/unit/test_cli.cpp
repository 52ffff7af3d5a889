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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "sen/cli/commands.hpp"
#include "sen/cli/report.hpp"
#include "sen/common/binary_io.hpp"
#include "sen/common/error.hpp"
#include "sen/trainer/config.hpp"

namespace sen::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"sen"};
    storage.insert(storage.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& f) const { return (path_ / f).string(); }

private:
    fs::path path_;
};

TEST(Cli, TrainHelpListsEveryDefault) {
    const Result r = invoke({"train", "--help"});
    EXPECT_EQ(r.code, kOk);
    const auto cls = train::TrainConfig::defaults(Task::classification);
    const auto seg = train::TrainConfig::defaults(Task::segmentation);
    for (const char* flag : {"--batch-size", "--epochs", "--lr", "--lambda", "--ema-momentum", "--pm-alpha", "--k",
                             "--points", "--seed", "--pm", "--no-recon", "--no-cons", "--config"})
        EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
    EXPECT_NE(r.out.find(std::to_string(cls.batch_size) + " (classification) / " + std::to_string(seg.batch_size) +
                         " (segmentation)"),
              std::string::npos);
    EXPECT_NE(r.out.find(std::to_string(cls.epochs) + " (classification) / " + std::to_string(seg.epochs) +
                         " (segmentation)"),
              std::string::npos);
    EXPECT_NE(r.out.find("0.2 (classification) / 0.05 (segmentation)"), std::string::npos);
    EXPECT_NE(r.out.find("0.99"), std::string::npos);
    EXPECT_NE(r.out.find("0.001"), std::string::npos);
}

TEST(Cli, TopLevelHelpNamesSubcommands) {
    const Result r = invoke({"--help"});
    EXPECT_EQ(r.code, kOk);
    for (const char* sub : {"gen-data", "train", "eval", "gradcheck", "report"})
        EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(invoke({}).code, kUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
    EXPECT_EQ(invoke({"train", "--source", "a", "--target", "b"}).code, kUsage);  // --out missing
    EXPECT_EQ(invoke({"train", "--source", "a", "--target", "b", "--out", "c", "--epochs", "many"}).code, kUsage);
    EXPECT_EQ(invoke({"train", "--source", "a", "--target", "b", "--out", "c", "--k", "0"}).code, kUsage);
    EXPECT_EQ(invoke({"gen-data", "--out", "x", "--mode", "detection"}).code, kUsage);
    EXPECT_EQ(invoke({"gen-data", "--out", "x", "--occlusion", "2"}).code, kUsage);
}

TEST(Cli, DataErrors) {
    TempDir dir("sen_test_cli_data");
    io::write_file(dir / "garbage.pcds", "not a dataset");
    const Result r = invoke({"train", "--source", dir / "garbage.pcds", "--target", dir / "garbage.pcds", "--out",
                             dir / "run"});
    EXPECT_EQ(r.code, kDataError);
    EXPECT_NE(r.err.find("pcds"), std::string::npos);
    EXPECT_EQ(invoke({"eval", "--checkpoint", dir / "missing.senc", "--data", dir / "garbage.pcds"}).code, kDataError);
    EXPECT_EQ(invoke({"report", dir / "missing.csv"}).code, kDataError);
}

TEST(Cli, GenDataWritesAllSplits) {
    TempDir dir("sen_test_cli_gen");
    const Result r = invoke({"gen-data", "--out", dir.path().string(), "--per-class", "2", "--points", "32",
                             "--export-csv"});
    ASSERT_EQ(r.code, kOk) << r.err;
    for (const char* domain : {"source", "target"})
        for (const char* split : {"train", "val", "test"}) {
            const std::string stem = std::string(domain) + "_" + split;
            EXPECT_TRUE(fs::exists(dir.path() / (stem + ".pcds"))) << stem;
            EXPECT_TRUE(fs::exists(dir.path() / (stem + ".csv"))) << stem;
        }
}

TEST(Report, MeanSem) {
    const std::vector<double> v{0.80, 0.82, 0.84};
    const MeanSem m = mean_sem(v);
    EXPECT_NEAR(m.mean, 0.82, 1e-15);
    EXPECT_NEAR(m.sem, 0.02 / std::sqrt(3.0), 1e-15);
    EXPECT_EQ(m.n, 3U);
    EXPECT_EQ(format_mean_sem(m), "0.8200 ± 0.0115");
    const std::vector<double> one{0.5};
    EXPECT_EQ(mean_sem(one).sem, 0.0);
    EXPECT_THROW(mean_sem(std::vector<double>{}), InvalidArgument);
}

TEST(Report, SummaryTableAndSvg) {
    const std::string header = "epoch,l_s,l_soft,l_t,l_cons,total,lr,student_acc,teacher_acc\n";
    std::vector<MetricsTable> runs;
    runs.push_back(parse_metrics_csv(header + "1,1,0,2,0,3,0.001,0.5,0.4\n2,0.5,0,1,0,2,0,0.80,0.81\n", "a"));
    runs.push_back(parse_metrics_csv(header + "1,1,0,2,0,3,0.001,0.5,0.4\n2,0.5,0,1,0,2,0,0.84,0.83\n", "b"));
    EXPECT_EQ(runs[0].series("student_acc"), (std::vector<double>{0.5, 0.80}));
    const std::string table = summary_table(runs);
    EXPECT_NE(table.find("runs: 2"), std::string::npos);
    EXPECT_NE(table.find("student_acc    0.8200 ± 0.0200"), std::string::npos) << table;
    EXPECT_NE(table.find("teacher_acc    0.8200 ± 0.0100"), std::string::npos) << table;
    const std::string svg = render_svg(runs, "student_acc");
    EXPECT_EQ(svg.rfind("<svg", 0), 0U);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 5, true);
    EXPECT_THROW(runs[0].column("nope"), FormatError);
    EXPECT_THROW(parse_metrics_csv(header + "1,2\n", "bad"), FormatError);
    EXPECT_THROW(parse_metrics_csv(header + "1,1,0,2,0,x,0,0,0\n", "bad"), FormatError);
    EXPECT_THROW(parse_metrics_csv(header, "empty"), FormatError);
}

TEST(Report, CommandWritesFiles) {
    TempDir dir("sen_test_cli_report");
    const std::string csv = "epoch,l_s,l_soft,l_t,l_cons,total,lr,student_acc,teacher_acc\n1,1,0,2,0,3,0,0.6,0.7\n";
    fs::create_directories(dir.path() / "seed0");
    io::write_file(dir.path() / "seed0" / "metrics.csv", csv);
    const Result r = invoke({"report", (dir.path() / "seed0" / "metrics.csv").string(), "--out",
                             dir.path().string()});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_NE(r.out.find("0.6000 ± 0.0000"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir.path() / "summary.txt"));
    EXPECT_NE(io::read_file(dir.path() / "learning_curve.svg").find("seed0"), std::string::npos);
}

}  // namespace
}  // namespace sen::cli
