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

#include "sen/trainer/checkpoint.hpp"

#include <cmath>
#include <map>

#include "sen/common/binary_io.hpp"
#include "sen/common/error.hpp"

namespace sen::train {

namespace {

constexpr std::string_view kMagic = "SENC";
constexpr std::uint32_t kVersion = 1;

struct Entry {
    std::string name;
    std::vector<std::uint64_t> dims;
    std::vector<double> values;
};

Entry scalar(std::string name, double v) { return {std::move(name), {}, {v}}; }

Entry vec(std::string name, const std::vector<std::size_t>& xs) {
    Entry e{std::move(name), {xs.size()}, {}};
    for (auto x : xs) e.values.push_back(static_cast<double>(x));
    return e;
}

Entry tensor(std::string name, const ad::Tensor& t) {
    Entry e{std::move(name), {}, {t.data().begin(), t.data().end()}};
    for (auto d : t.shape()) e.dims.push_back(d);
    return e;
}

std::vector<Entry> arch_entries(const model::Arch& a) {
    return {
        scalar("@arch.task", a.task == Task::classification ? 0.0 : 1.0),
        scalar("@arch.points", static_cast<double>(a.points)),
        scalar("@arch.k", static_cast<double>(a.k)),
        vec("@arch.edge_widths", a.edge_widths),
        scalar("@arch.latent", static_cast<double>(a.latent)),
        scalar("@arch.head_hidden", static_cast<double>(a.head_hidden)),
        scalar("@arch.point_width", static_cast<double>(a.point_width)),
        vec("@arch.decoder_widths", a.decoder_widths),
        scalar("@arch.num_classes", static_cast<double>(a.num_classes)),
        scalar("@arch.dynamic_graph", a.dynamic_graph ? 1.0 : 0.0),
    };
}

class EntryTable {
public:
    explicit EntryTable(std::vector<Entry> entries) {
        for (auto& e : entries) {
            auto name = e.name;
            if (!table_.emplace(name, std::move(e)).second) throw FormatError("checkpoint: duplicate entry " + name);
        }
    }

    bool has(const std::string& name) const { return table_.contains(name); }

    const Entry& get(const std::string& name) const {
        auto it = table_.find(name);
        if (it == table_.end()) throw FormatError("checkpoint: missing entry " + name);
        return it->second;
    }

    double scalar(const std::string& name) const {
        const auto& e = get(name);
        if (!e.dims.empty() || e.values.size() != 1) throw FormatError("checkpoint: " + name + " is not a scalar");
        return e.values[0];
    }

    std::size_t count(const std::string& name) const {
        const double v = scalar(name);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw FormatError("checkpoint: " + name + " is not a count");
        return static_cast<std::size_t>(v);
    }

    std::vector<std::size_t> counts(const std::string& name) const {
        const auto& e = get(name);
        if (e.dims.size() != 1) throw FormatError("checkpoint: " + name + " is not a vector");
        std::vector<std::size_t> out;
        for (double v : e.values) {
            if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
                throw FormatError("checkpoint: " + name + " holds a non-count");
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    }

    std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, Entry> table_;
};

model::Arch decode_arch(const EntryTable& t) {
    model::Arch a;
    const auto task = t.count("@arch.task");
    if (task > 1) throw FormatError("checkpoint: unknown task flag");
    a.task = task == 0 ? Task::classification : Task::segmentation;
    a.points = t.count("@arch.points");
    a.k = t.count("@arch.k");
    a.edge_widths = t.counts("@arch.edge_widths");
    a.latent = t.count("@arch.latent");
    a.head_hidden = t.count("@arch.head_hidden");
    a.point_width = t.count("@arch.point_width");
    a.decoder_widths = t.counts("@arch.decoder_widths");
    a.num_classes = t.count("@arch.num_classes");
    a.dynamic_graph = t.count("@arch.dynamic_graph") != 0;
    return a;
}

void copy_values(const Entry& e, const ad::Shape& shape, std::span<double> dst) {
    if (e.dims.size() != shape.size() || !std::equal(e.dims.begin(), e.dims.end(), shape.begin()))
        throw FormatError("checkpoint: shape mismatch for " + e.name);
    std::copy(e.values.begin(), e.values.end(), dst.begin());
}

}  // namespace

std::string encode_checkpoint(const model::ModelParams& model, std::uint64_t config_digest, const mt::EmaState* ema,
                              const AdamState* adam) {
    std::vector<Entry> entries = arch_entries(model.arch());
    if (ema) {
        entries.push_back(scalar("@ema.momentum", ema->momentum));
        entries.push_back(scalar("@ema.step", static_cast<double>(ema->step)));
        entries.push_back(scalar("@ema.warmup", ema->warmup ? 1.0 : 0.0));
    }
    const auto params = model.parameters();
    if (adam) {
        if (adam->m.size() != params.size() || adam->v.size() != params.size())
            throw InvalidArgument("checkpoint: Adam state does not match the model");
        entries.push_back(scalar("@adam.step", static_cast<double>(adam->step)));
        entries.push_back(scalar("@adam.beta1", adam->beta1));
        entries.push_back(scalar("@adam.beta2", adam->beta2));
        entries.push_back(scalar("@adam.eps", adam->eps));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const ad::Tensor m(params[i].value.shape(), adam->m[i]);
            const ad::Tensor v(params[i].value.shape(), adam->v[i]);
            entries.push_back(tensor("@adam.m/" + params[i].name, m));
            entries.push_back(tensor("@adam.v/" + params[i].name, v));
        }
    }
    for (const auto& p : params) entries.push_back(tensor(p.name, p.value));

    io::ByteWriter w;
    w.bytes(kMagic);
    w.u32(kVersion);
    w.u64(config_digest);
    w.u64(entries.size());
    for (const auto& e : entries) {
        w.u32(static_cast<std::uint32_t>(e.name.size()));
        w.bytes(e.name);
        w.u32(static_cast<std::uint32_t>(e.dims.size()));
        for (auto d : e.dims) w.u64(d);
        for (double v : e.values) w.f64(v);
    }
    return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    io::ByteReader r(bytes, "checkpoint");
    if (r.bytes(4) != kMagic) throw FormatError("checkpoint: bad magic");
    if (const auto v = r.u32(); v != kVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(v));
    const std::uint64_t digest = r.u64();
    const std::uint64_t count = r.u64();
    std::vector<Entry> entries;
    for (std::uint64_t i = 0; i < count; ++i) {
        Entry e;
        const auto len = r.u32();
        e.name = std::string(r.bytes(len));
        const auto rank = r.u32();
        if (rank > 8) throw FormatError("checkpoint: implausible rank for " + e.name);
        std::uint64_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            e.dims.push_back(r.u64());
            if (e.dims.back() != 0 && n > r.remaining() / e.dims.back()) throw FormatError("checkpoint: truncated data");
            n *= e.dims.back();
        }
        if (n > r.remaining() / 8) throw FormatError("checkpoint: truncated data");
        e.values.resize(n);
        for (double& x : e.values) x = r.f64();
        entries.push_back(std::move(e));
    }
    if (!r.at_end()) throw FormatError("checkpoint: trailing bytes");

    const EntryTable table(std::move(entries));
    const model::Arch arch = decode_arch(table);
    auto build = [&] {
        try {
            return model::ModelParams(arch, 0);
        } catch (const InvalidArgument& e) {
            throw FormatError(std::string("checkpoint: bad architecture: ") + e.what());
        }
    };
    Checkpoint ck{digest, build(), std::nullopt, std::nullopt};
    std::size_t used = arch_entries(arch).size();
    auto params = ck.model.parameters();
    for (auto& p : params) copy_values(table.get(p.name), p.value.shape(), p.value.mutable_data());
    used += params.size();

    if (table.has("@ema.momentum")) {
        ck.ema = mt::EmaState{table.scalar("@ema.momentum"), table.count("@ema.step"),
                              table.count("@ema.warmup") != 0};
        used += 3;
    }
    if (table.has("@adam.step")) {
        AdamState a = AdamState::for_parameters(params);
        a.step = table.count("@adam.step");
        a.beta1 = table.scalar("@adam.beta1");
        a.beta2 = table.scalar("@adam.beta2");
        a.eps = table.scalar("@adam.eps");
        for (std::size_t i = 0; i < params.size(); ++i) {
            copy_values(table.get("@adam.m/" + params[i].name), params[i].value.shape(), a.m[i]);
            copy_values(table.get("@adam.v/" + params[i].name), params[i].value.shape(), a.v[i]);
        }
        used += 4 + 2 * params.size();
        ck.adam = std::move(a);
    }
    if (used != table.size()) throw FormatError("checkpoint: unexpected extra entries");
    return ck;
}

void save_checkpoint(const std::filesystem::path& path, const model::ModelParams& model, std::uint64_t config_digest,
                     const mt::EmaState* ema, const AdamState* adam) {
    io::write_file(path, encode_checkpoint(model, config_digest, ema, adam));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

}  // namespace sen::train
