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

#include "sen/trainer/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sen/common/binary_io.hpp"
#include "sen/common/error.hpp"

namespace sen::train {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    T v{};
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
        throw InvalidArgument("config: bad value '" + std::string(text) + "' for " + std::string(key));
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    throw InvalidArgument("config: bad boolean '" + std::string(text) + "' for " + std::string(key));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view method_name(Method method) { return method == Method::sen ? "sen" : "source-only"; }

Method parse_method(std::string_view name) {
    if (name == "sen") return Method::sen;
    if (name == "source-only" || name == "source_only") return Method::source_only;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected sen or source-only)");
}

TrainConfig TrainConfig::defaults(Task mode) {
    TrainConfig c;
    c.mode = mode;
    if (mode == Task::segmentation) {
        c.batch_size = 16;
        c.epochs = 200;
        c.lambda = 0.05;
    }
    return c;
}

void TrainConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (batch_size == 0) throw InvalidArgument("config: batch_size must be positive");
    if (epochs == 0) throw InvalidArgument("config: epochs must be positive");
    if (!positive(lr0)) throw InvalidArgument("config: lr0 must be positive");
    if (!std::isfinite(lr_min) || lr_min < 0.0 || lr_min > lr0)
        throw InvalidArgument("config: lr_min must lie in [0, lr0]");
    if (!std::isfinite(lambda) || lambda < 0.0) throw InvalidArgument("config: lambda must be >= 0");
    if (!std::isfinite(ema_momentum) || ema_momentum < 0.0 || ema_momentum >= 1.0)
        throw InvalidArgument("config: ema_momentum must lie in [0, 1)");
    if (!positive(pm_alpha)) throw InvalidArgument("config: pm_alpha must be positive");
    if (points < 2) throw InvalidArgument("config: points must be at least 2");
    if (k == 0 || k >= points) throw InvalidArgument("config: k must lie in [1, points - 1]");
    if (!std::isfinite(jitter_sigma) || jitter_sigma < 0.0) throw InvalidArgument("config: jitter_sigma must be >= 0");
    if (!positive(jitter_clip)) throw InvalidArgument("config: jitter_clip must be positive");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::entries() const {
    return {
        {"mode", std::string(task_name(mode))},
        {"method", std::string(method_name(method))},
        {"batch_size", std::to_string(batch_size)},
        {"epochs", std::to_string(epochs)},
        {"lr0", fmt(lr0)},
        {"lr_min", fmt(lr_min)},
        {"lambda", fmt(lambda)},
        {"ema_momentum", fmt(ema_momentum)},
        {"ema_warmup", fmt(ema_warmup)},
        {"pm_alpha", fmt(pm_alpha)},
        {"use_pm", fmt(use_pm)},
        {"k", std::to_string(k)},
        {"points", std::to_string(points)},
        {"seed", std::to_string(seed)},
        {"jitter_sigma", fmt(jitter_sigma)},
        {"jitter_clip", fmt(jitter_clip)},
        {"soft", fmt(soft)},
        {"recon", fmt(recon)},
        {"cons", fmt(cons)},
        {"freeze_teacher", fmt(freeze_teacher)},
        {"teacher_views", fmt(teacher_views)},
    };
}

void TrainConfig::set(std::string_view key, std::string_view value) {
    if (key == "mode") mode = parse_task(value);
    else if (key == "method") method = parse_method(value);
    else if (key == "batch_size") batch_size = parse_number<std::size_t>(key, value);
    else if (key == "epochs") epochs = parse_number<std::size_t>(key, value);
    else if (key == "lr0") lr0 = parse_number<double>(key, value);
    else if (key == "lr_min") lr_min = parse_number<double>(key, value);
    else if (key == "lambda") lambda = parse_number<double>(key, value);
    else if (key == "ema_momentum") ema_momentum = parse_number<double>(key, value);
    else if (key == "ema_warmup") ema_warmup = parse_bool(key, value);
    else if (key == "pm_alpha") pm_alpha = parse_number<double>(key, value);
    else if (key == "use_pm") use_pm = parse_bool(key, value);
    else if (key == "k") k = parse_number<std::size_t>(key, value);
    else if (key == "points") points = parse_number<std::size_t>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "jitter_sigma") jitter_sigma = parse_number<double>(key, value);
    else if (key == "jitter_clip") jitter_clip = parse_number<double>(key, value);
    else if (key == "soft") soft = parse_bool(key, value);
    else if (key == "recon") recon = parse_bool(key, value);
    else if (key == "cons") cons = parse_bool(key, value);
    else if (key == "freeze_teacher") freeze_teacher = parse_bool(key, value);
    else if (key == "teacher_views") teacher_views = parse_bool(key, value);
    else throw InvalidArgument("config: unknown key '" + std::string(key) + "'");
}

std::string TrainConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : entries()) out += k + "=" + v + "\n";
    return out;
}

TrainConfig TrainConfig::from_text(std::string_view text, std::optional<Task> mode) {
    TrainConfig c = defaults(mode.value_or(Task::classification));
    std::vector<std::pair<std::string, std::string>> rest;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw InvalidArgument("config: expected key=value, got '" + line + "'");
        const auto key = trim(t.substr(0, eq));
        const auto value = trim(t.substr(eq + 1));
        if (key == "mode") {
            if (!mode) c = defaults(parse_task(value));
        } else {
            rest.emplace_back(key, value);
        }
    }
    for (const auto& [k, v] : rest) c.set(k, v);
    return c;
}

std::uint64_t TrainConfig::digest() const { return io::fnv1a(to_text()); }

}  // namespace sen::train
