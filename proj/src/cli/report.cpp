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

#include "sen/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sen/common/binary_io.hpp"
#include "sen/common/error.hpp"

namespace sen::cli {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string xml_escape(const std::string& in) {
    std::string out;
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::size_t MetricsTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError(label + ": no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> MetricsTable::series(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

MetricsTable parse_metrics_csv(const std::string& text, std::string label) {
    MetricsTable t;
    t.label = std::move(label);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw FormatError(t.label + ": missing CSV header");
    if (line.back() == '\r') line.pop_back();
    t.header = split(line, ',');
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != t.header.size())
            throw FormatError(t.label + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " fields");
        std::vector<double> row;
        for (const auto& c : cells) {
            double v = 0.0;
            const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
            if (r.ec != std::errc() || r.ptr != c.data() + c.size())
                throw FormatError(t.label + ":" + std::to_string(lineno) + ": not a number '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) throw FormatError(t.label + ": no data rows");
    return t;
}

MetricsTable read_metrics_csv(const std::filesystem::path& path) {
    return parse_metrics_csv(io::read_file(path), path.string());
}

MeanSem mean_sem(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("mean_sem: no values");
    MeanSem m;
    m.n = values.size();
    for (double v : values) m.mean += v;
    m.mean /= static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        const double s = std::sqrt(ss / static_cast<double>(m.n - 1));
        m.sem = s / std::sqrt(static_cast<double>(m.n));
    }
    return m;
}

std::string format_mean_sem(const MeanSem& m, int decimals) {
    return fixed(m.mean, decimals) + " ± " + fixed(m.sem, decimals);
}

std::string summary_table(std::span<const MetricsTable> runs) {
    if (runs.empty()) throw InvalidArgument("summary_table: no runs");
    // Metric columns are the last two: student then teacher.
    const auto& h = runs.front().header;
    if (h.size() < 2) throw FormatError("summary_table: too few columns");
    const std::vector<std::string> metrics{h[h.size() - 2], h[h.size() - 1], "total", "l_t"};
    std::ostringstream out;
    out << "runs: " << runs.size() << "\n";
    out << "metric         final (mean ± SEM)\n";
    for (const auto& name : metrics) {
        std::vector<double> finals;
        for (const auto& r : runs) finals.push_back(r.rows.back()[r.column(name)]);
        std::string padded = name;
        padded.resize(std::max<std::size_t>(padded.size(), 14), ' ');
        out << padded << " " << format_mean_sem(mean_sem(finals)) << "\n";
    }
    return out.str();
}

std::string render_svg(std::span<const MetricsTable> runs, const std::string& column) {
    if (runs.empty()) throw InvalidArgument("render_svg: no runs");
    constexpr double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
    double xmax = 1, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& r : runs) {
        for (const auto& row : r.rows) {
            xmax = std::max(xmax, row[r.column("epoch")]);
            const double y = row[r.column(column)];
            if (std::isfinite(y)) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
        }
    }
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
    auto px = [&](double x) { return L + (W - L - R) * (x - 1) / std::max(1.0, xmax - 1); };
    auto py = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = ymin + (ymax - ymin) * i / 4.0;
        s << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << fixed(y, 3)
          << "</text>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">epoch (1.."
      << xmax << ")</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << T - 10 << "\" text-anchor=\"middle\">" << xml_escape(column)
      << "</text>\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        const char* color = kPalette[i % std::size(kPalette)];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& row : r.rows) s << px(row[r.column("epoch")]) << "," << py(row[r.column(column)]) << " ";
        s << "\"/>\n";
        s << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (i + 1) << "\" text-anchor=\"end\" fill=\"" << color
          << "\">" << xml_escape(r.label) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace sen::cli
