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

#include "sen/data_synth/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "sen/common/binary_io.hpp"
#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"
#include "sen/pointcloud/transforms.hpp"

namespace sen::synth {

namespace {

constexpr std::string_view kMagic = "PCDS";
constexpr std::uint32_t kVersion = 1;

enum Stream : std::uint64_t { kShapeStream = 11, kDomainStream = 12 };

}  // namespace

void Dataset::validate() const {
    if (points == 0 || num_classes == 0) throw InvalidArgument("dataset: points and classes must be positive");
    const std::size_t expect = task == Task::classification ? clouds.size() : clouds.size() * points;
    if (labels.size() != expect) throw InvalidArgument("dataset: label count does not match");
    for (const auto& c : clouds)
        if (c.size() != points) throw InvalidArgument("dataset: cloud size differs from points");
    for (std::size_t l : labels)
        if (l >= num_classes) throw InvalidArgument("dataset: label out of range");
}

DatasetSplits build_dataset(std::span<const ShapeSpec> classes, const DomainProfile& profile,
                            const BuildOptions& options) {
    if (classes.empty()) throw InvalidArgument("build_dataset: no classes");
    if (options.per_class == 0) throw InvalidArgument("build_dataset: per_class must be positive");
    const auto& r = options.split;
    if (r.train < 0 || r.val < 0 || r.test < 0 || std::abs(r.train + r.val + r.test - 1.0) > 1e-9)
        throw InvalidArgument("build_dataset: split ratios must be non-negative and sum to 1");
    profile.validate();
    const std::size_t m_raw = options.m_raw ? options.m_raw : std::max<std::size_t>(64, 32 * options.m_final);
    const bool seg = options.task == Task::segmentation;

    DatasetSplits out;
    for (Dataset* d : {&out.train, &out.val, &out.test}) {
        d->task = options.task;
        d->points = options.m_final;
        d->num_classes = seg ? kNumParts : classes.size();
    }
    const auto n = options.per_class;
    const auto n_train = static_cast<std::size_t>(std::llround(r.train * static_cast<double>(n)));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(r.val * static_cast<double>(n))));

    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t index = c * n + i;
            const auto shape = generate_shape(classes[c], m_raw, derive_seed(options.seed, kShapeStream, index));
            auto dom = apply_domain(shape.cloud, profile, options.m_final,
                                    derive_seed(options.seed, kDomainStream, index));
            Dataset& d = i < n_train ? out.train : (i < n_train + n_val ? out.val : out.test);
            d.clouds.push_back(pc::normalize_unit_sphere(dom.cloud));
            if (seg) {
                for (std::size_t s : dom.source_indices) d.labels.push_back(shape.parts[s]);
            } else {
                d.labels.push_back(c);
            }
        }
    }
    return out;
}

std::string encode_pcds(const Dataset& data) {
    data.validate();
    if (data.num_classes > std::numeric_limits<std::uint16_t>::max() + std::size_t{1})
        throw InvalidArgument("dataset: too many classes for u16 labels");
    io::ByteWriter w;
    w.bytes(kMagic);
    w.u32(kVersion);
    w.u32(data.task == Task::classification ? 0 : 1);
    w.u64(data.size());
    w.u32(static_cast<std::uint32_t>(data.points));
    w.u32(static_cast<std::uint32_t>(data.num_classes));
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.task == Task::classification) {
            w.u16(static_cast<std::uint16_t>(data.labels[i]));
        } else {
            for (std::size_t l : data.part_labels(i)) w.u16(static_cast<std::uint16_t>(l));
        }
        for (double v : data.clouds[i].xyz()) w.f64(v);
    }
    return w.take();
}

Dataset decode_pcds(std::string_view bytes) {
    io::ByteReader r(bytes, "pcds");
    if (r.bytes(4) != kMagic) throw FormatError("pcds: bad magic");
    if (const auto v = r.u32(); v != kVersion) throw FormatError("pcds: unsupported version " + std::to_string(v));
    Dataset d;
    const auto mode = r.u32();
    if (mode > 1) throw FormatError("pcds: unknown mode flag " + std::to_string(mode));
    d.task = mode == 0 ? Task::classification : Task::segmentation;
    const auto count = r.u64();
    d.points = r.u32();
    d.num_classes = r.u32();
    if (d.points == 0 || d.num_classes == 0) throw FormatError("pcds: zero points or classes");
    const std::size_t labels_per = d.task == Task::classification ? 1 : d.points;
    const std::size_t record = 2 * labels_per + 24 * d.points;
    if (count > r.remaining() / record) throw FormatError("pcds: truncated data");
    d.clouds.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < labels_per; ++j) {
            const std::size_t l = r.u16();
            if (l >= d.num_classes) throw FormatError("pcds: label out of range");
            d.labels.push_back(l);
        }
        std::vector<double> xyz(3 * d.points);
        for (double& v : xyz) v = r.f64();
        try {
            d.clouds.emplace_back(std::move(xyz));
        } catch (const InvalidArgument& e) {
            throw FormatError(std::string("pcds: ") + e.what());
        }
    }
    if (!r.at_end()) throw FormatError("pcds: trailing bytes");
    return d;
}

void write_pcds(const Dataset& data, const std::filesystem::path& path) { io::write_file(path, encode_pcds(data)); }

Dataset read_pcds(const std::filesystem::path& path) { return decode_pcds(io::read_file(path)); }

void export_csv(const Dataset& data, const std::filesystem::path& path) {
    data.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << "sample_id,x,y,z,label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t p = 0; p < data.points; ++p) {
            const auto q = data.clouds[i].point(p);
            const std::size_t label = data.task == Task::classification ? data.labels[i] : data.part_labels(i)[p];
            out << i << ',' << q[0] << ',' << q[1] << ',' << q[2] << ',' << label << '\n';
        }
    }
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace sen::synth
