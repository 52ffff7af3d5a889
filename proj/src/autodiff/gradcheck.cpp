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

#include "sen/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sen::ad {

double relative_error(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
    return std::abs(a - b) / denom;
}

namespace {

struct Probe {
    double value;
    std::uint64_t pattern;
};

Probe evaluate(const std::function<Tensor()>& loss) {
    NoGradScope no_grad;
    branch_trace::begin();
    double value = 0.0;
    try {
        value = loss().item();
    } catch (...) {
        branch_trace::end();
        throw;
    }
    return {value, branch_trace::end()};
}

}  // namespace

GradCheckReport finite_difference_check(const std::function<Tensor()>& loss,
                                        std::span<Parameter* const> params,
                                        const GradCheckOptions& options) {
    for (auto* p : params) p->zero_grad();
    {
        Tape tape;
        TapeScope scope(tape);
        const Tensor l = loss();
        if (tape.owns(l)) tape.backward(l);
    }

    const std::uint64_t base_pattern = evaluate(loss).pattern;
    const double h = options.step;

    GradCheckReport report;
    for (auto* p : params) {
        ParamGradCheck pc;
        pc.name = p->name;
        const std::size_t n = p->value.numel();
        const std::size_t probes =
            options.max_entries_per_param == 0 ? n : std::min(n, options.max_entries_per_param);
        for (std::size_t k = 0; k < probes; ++k) {
            const std::size_t i = probes == n ? k : (k * n) / probes;
            const double original = p->value[i];
            // Offsets and weights of the central stencil, in units of h.
            static constexpr std::pair<double, double> kCentral[] = {{1.0, 0.5}, {-1.0, -0.5}};
            static constexpr std::pair<double, double> kFivePoint[] = {
                {2.0, -1.0 / 12.0}, {1.0, 8.0 / 12.0}, {-1.0, -8.0 / 12.0}, {-2.0, 1.0 / 12.0}};
            const std::span<const std::pair<double, double>> stencil =
                options.five_point ? std::span<const std::pair<double, double>>(kFivePoint)
                                   : std::span<const std::pair<double, double>>(kCentral);
            double numeric = 0.0;
            bool kink = false;
            for (const auto& [offset, weight] : stencil) {
                p->value.mutable_data()[i] = original + offset * h;
                const Probe probe = evaluate(loss);
                kink = kink || probe.pattern != base_pattern;
                numeric += weight * probe.value;
            }
            p->value.mutable_data()[i] = original;
            if (kink) {
                ++pc.skipped;
                continue;
            }
            numeric /= h;
            const double analytic = p->grad[i];
            const double err = relative_error(analytic, numeric);
            ++pc.checked;
            pc.max_rel_error = std::max(pc.max_rel_error, err);
            if (err > options.tolerance) {
                ++pc.failed;
                if (report.failures.size() < 16) {
                    std::ostringstream os;
                    os << p->name << "[" << i << "]: tape " << analytic << " numeric " << numeric
                       << " rel " << err;
                    report.failures.push_back(os.str());
                }
            }
        }
        report.max_rel_error = std::max(report.max_rel_error, pc.max_rel_error);
        report.checked += pc.checked;
        report.skipped += pc.skipped;
        report.failed += pc.failed;
        report.params.push_back(std::move(pc));
    }
    return report;
}

}  // namespace sen::ad
