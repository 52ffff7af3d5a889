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

#include "sen/data_synth/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sen/common/error.hpp"
#include "sen/common/rng.hpp"

namespace sen::synth {

namespace {

constexpr double kPi = std::numbers::pi;

struct Sampler {
    Rng& rng;
    std::vector<double> xyz;
    std::vector<std::size_t> parts;

    void emit(double x, double y, double z, std::size_t part) {
        xyz.insert(xyz.end(), {x, y, z});
        parts.push_back(part);
    }
};

double jittered(Rng& rng, double base, double j) { return base * rng.uniform(1.0 - j, 1.0 + j); }

// Picks index i with probability weights[i] / sum(weights).
std::size_t pick(Rng& rng, std::initializer_list<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    std::size_t i = 0;
    for (double w : weights) {
        if (u < w) return i;
        u -= w;
        ++i;
    }
    return weights.size() - 1;
}

void sample_sphere(Sampler& s, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        double x, y, z, n;
        do {
            x = s.rng.normal();
            y = s.rng.normal();
            z = s.rng.normal();
            n = std::sqrt(x * x + y * y + z * z);
        } while (n < 1e-12);
        x /= n, y /= n, z /= n;
        s.emit(x, y, z, z > 0.6 ? top : (z < -0.6 ? bottom : side));
    }
}

void sample_box(Sampler& s, std::size_t m, double ex, double ey, double ez) {
    const double axy = ex * ey, axz = ex * ez, ayz = ey * ez;
    for (std::size_t i = 0; i < m; ++i) {
        const double u = s.rng.uniform(-1.0, 1.0), v = s.rng.uniform(-1.0, 1.0);
        const double sign = s.rng.uniform() < 0.5 ? -1.0 : 1.0;
        switch (pick(s.rng, {axy, axz, ayz})) {
            case 0: s.emit(u * ex, v * ey, sign * ez, sign > 0 ? top : bottom); break;
            case 1: s.emit(u * ex, sign * ey, v * ez, side); break;
            default: s.emit(sign * ex, u * ey, v * ez, side); break;
        }
    }
}

void sample_cylinder(Sampler& s, std::size_t m, double r, double h) {
    for (std::size_t i = 0; i < m; ++i) {
        const double t = s.rng.uniform(0.0, 2.0 * kPi);
        switch (pick(s.rng, {2.0 * kPi * r * 2.0 * h, kPi * r * r, kPi * r * r})) {
            case 0: s.emit(r * std::cos(t), r * std::sin(t), s.rng.uniform(-h, h), side); break;
            case 1: {
                const double rr = r * std::sqrt(s.rng.uniform());
                s.emit(rr * std::cos(t), rr * std::sin(t), h, top);
                break;
            }
            default: {
                const double rr = r * std::sqrt(s.rng.uniform());
                s.emit(rr * std::cos(t), rr * std::sin(t), -h, bottom);
                break;
            }
        }
    }
}

void sample_cone(Sampler& s, std::size_t m, double r, double h) {
    // Base disc at z = -h, apex at z = +h.
    const double slant = std::sqrt(r * r + 4.0 * h * h);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = s.rng.uniform(0.0, 2.0 * kPi);
        if (pick(s.rng, {kPi * r * slant, kPi * r * r}) == 0) {
            // Lateral area grows linearly with distance from the apex.
            const double f = std::sqrt(s.rng.uniform());
            s.emit(f * r * std::cos(t), f * r * std::sin(t), h - 2.0 * h * f, side);
        } else {
            const double rr = r * std::sqrt(s.rng.uniform());
            s.emit(rr * std::cos(t), rr * std::sin(t), -h, bottom);
        }
    }
}

void sample_torus(Sampler& s, std::size_t m, double big_r, double small_r) {
    for (std::size_t i = 0; i < m; ++i) {
        double phi;
        // Surface density is proportional to R + r cos(phi).
        do {
            phi = s.rng.uniform(0.0, 2.0 * kPi);
        } while (s.rng.uniform() * (big_r + small_r) > big_r + small_r * std::cos(phi));
        const double t = s.rng.uniform(0.0, 2.0 * kPi);
        const double rho = big_r + small_r * std::cos(phi);
        const double z = small_r * std::sin(phi);
        s.emit(rho * std::cos(t), rho * std::sin(t), z,
               z > 0.5 * small_r ? top : (z < -0.5 * small_r ? bottom : side));
    }
}

void sample_plane_cross(Sampler& s, std::size_t m, double a, double h) {
    for (std::size_t i = 0; i < m; ++i) {
        const double u = s.rng.uniform(-a, a), z = s.rng.uniform(-h, h);
        const std::size_t part = z > 0.8 * h ? top : (z < -0.8 * h ? bottom : side);
        if (s.rng.uniform() < 0.5)
            s.emit(u, 0.0, z, part);
        else
            s.emit(0.0, u, z, part);
    }
}

}  // namespace

std::string_view family_name(ShapeFamily family) {
    switch (family) {
        case ShapeFamily::sphere: return "sphere";
        case ShapeFamily::box: return "box";
        case ShapeFamily::cylinder: return "cylinder";
        case ShapeFamily::cone: return "cone";
        case ShapeFamily::torus: return "torus";
        case ShapeFamily::plane_cross: return "plane-cross";
    }
    return "unknown";
}

ShapeFamily parse_family(std::string_view name) {
    for (auto f : {ShapeFamily::sphere, ShapeFamily::box, ShapeFamily::cylinder, ShapeFamily::cone,
                   ShapeFamily::torus, ShapeFamily::plane_cross})
        if (family_name(f) == name) return f;
    throw InvalidArgument("unknown shape family '" + std::string(name) + "'");
}

std::vector<ShapeSpec> default_classes() {
    return {{ShapeFamily::sphere, 0.25}, {ShapeFamily::box, 0.25},   {ShapeFamily::cylinder, 0.25},
            {ShapeFamily::cone, 0.25},   {ShapeFamily::torus, 0.25}, {ShapeFamily::plane_cross, 0.25}};
}

std::vector<ShapeSpec> default_part_shapes() { return {{ShapeFamily::cylinder, 0.3}, {ShapeFamily::box, 0.3}}; }

LabelledCloud generate_shape(const ShapeSpec& spec, std::size_t m_raw, std::uint64_t seed) {
    if (m_raw < 64) throw InvalidArgument("generate_shape: need at least 64 raw points");
    Rng rng(seed);
    Sampler s{rng, {}, {}};
    s.xyz.reserve(3 * m_raw);
    s.parts.reserve(m_raw);
    const double j = spec.scale_jitter;
    switch (spec.family) {
        case ShapeFamily::sphere: sample_sphere(s, m_raw); break;
        case ShapeFamily::box:
            sample_box(s, m_raw, jittered(rng, 1.0, j), jittered(rng, 0.7, j), jittered(rng, 0.5, j));
            break;
        case ShapeFamily::cylinder: sample_cylinder(s, m_raw, jittered(rng, 0.5, j), jittered(rng, 0.9, j)); break;
        case ShapeFamily::cone: sample_cone(s, m_raw, jittered(rng, 0.6, j), jittered(rng, 0.8, j)); break;
        case ShapeFamily::torus: sample_torus(s, m_raw, jittered(rng, 0.8, j), jittered(rng, 0.3, j)); break;
        case ShapeFamily::plane_cross:
            sample_plane_cross(s, m_raw, jittered(rng, 0.8, j), jittered(rng, 0.8, j));
            break;
    }
    double max_norm = 0.0;
    for (std::size_t i = 0; i < m_raw; ++i) {
        const double* p = s.xyz.data() + 3 * i;
        max_norm = std::max(max_norm, std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    }
    for (auto& v : s.xyz) v /= max_norm;
    return {pc::PointCloud(std::move(s.xyz)), std::move(s.parts)};
}

}  // namespace sen::synth
