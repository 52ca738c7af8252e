// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "invren/rng.h"
#include "invren/tape.h"
#include "invren/vec.h"

namespace invren {

struct HashGridSpec {
    uint32_t levels = 8;
    uint32_t log2_table = 17;   // T entries per level
    uint32_t features = 2;      // F per entry
    double base_resolution = 16.0;
    double top_resolution = 1024.0;
};

// Multi-resolution hash grid encoding. Corner features are trilinearly
// interpolated per level; corners are keyed by integer lattice coordinates
// (dense indexing when the level fits the table, spatial hashing otherwise)
// so the encoding is continuous across cell boundaries.
class HashGrid {
public:
    HashGrid() = default;
    HashGrid(const HashGridSpec& spec, const Aabb& bounds) : spec_(spec), bounds_(bounds) {
        level_res_.resize(spec_.levels);
        const double growth = spec_.levels > 1
                                  ? std::exp((std::log(spec_.top_resolution) - std::log(spec_.base_resolution)) /
                                             (spec_.levels - 1))
                                  : 1.0;
        for (uint32_t l = 0; l < spec_.levels; ++l)
            level_res_[l] = static_cast<uint32_t>(std::floor(spec_.base_resolution * std::pow(growth, l)));
    }

    uint32_t table_size() const { return 1u << spec_.log2_table; }
    uint32_t output_dim() const { return spec_.levels * spec_.features; }
    uint32_t param_count() const { return spec_.levels * table_size() * spec_.features; }
    const HashGridSpec& spec() const { return spec_; }
    const Aabb& bounds() const { return bounds_; }

    void register_params(ParameterStore& store, const std::string& name) {
        offset_ = store.add_segment(name, param_count());
    }

    void init(ParameterStore& store, Rng& rng) const {
        for (uint32_t i = 0; i < param_count(); ++i)
            store.set_value(offset_ + i, (2.0 * rng.next_double() - 1.0) * 1e-4);
    }

    // Encodes x (world space). Positions outside the bounds are clamped and
    // flagged through `oob` when provided.
    template <EvalContext Ctx>
    void encode(const Ctx& ctx, const Vec3& x, typename Ctx::R* out, bool* oob = nullptr) const {
        Vec3 ext = bounds_.extent();
        Vec3 p{(x.x - bounds_.lo.x) / ext.x, (x.y - bounds_.lo.y) / ext.y, (x.z - bounds_.lo.z) / ext.z};
        bool clamped = false;
        for (int a = 0; a < 3; ++a) {
            double& c = (a == 0) ? p.x : (a == 1 ? p.y : p.z);
            if (c < 0.0 || c > 1.0) {
                c = std::clamp(c, 0.0, 1.0);
                clamped = true;
            }
        }
        if (oob) *oob = clamped;

        const uint32_t F = spec_.features;
        for (uint32_t l = 0; l < spec_.levels; ++l) {
            const uint32_t res = level_res_[l];
            double sx = p.x * res, sy = p.y * res, sz = p.z * res;
            uint32_t ix = std::min(static_cast<uint32_t>(sx), res - 1);
            uint32_t iy = std::min(static_cast<uint32_t>(sy), res - 1);
            uint32_t iz = std::min(static_cast<uint32_t>(sz), res - 1);
            const double fx = sx - ix, fy = sy - iy, fz = sz - iz;

            uint32_t corner_idx[8];
            double corner_w[8];
            for (uint32_t c = 0; c < 8; ++c) {
                const uint32_t cx = ix + (c & 1u);
                const uint32_t cy = iy + ((c >> 1) & 1u);
                const uint32_t cz = iz + ((c >> 2) & 1u);
                corner_idx[c] = corner_index(l, res, cx, cy, cz);
                const double wx = (c & 1u) ? fx : 1.0 - fx;
                const double wy = ((c >> 1) & 1u) ? fy : 1.0 - fy;
                const double wz = ((c >> 2) & 1u) ? fz : 1.0 - fz;
                corner_w[c] = wx * wy * wz;
            }
            interpolate(ctx, corner_idx, corner_w, F, out + l * F);
        }
    }

    uint32_t offset() const { return offset_; }

private:
    uint32_t corner_index(uint32_t level, uint32_t res, uint32_t x, uint32_t y, uint32_t z) const {
        const uint32_t T = table_size();
        const uint64_t corners = static_cast<uint64_t>(res + 1) * (res + 1) * (res + 1);
        uint32_t idx;
        if (corners <= T) {
            idx = x + (res + 1) * (y + (res + 1) * z);
        } else {
            idx = (x * 1u) ^ (y * 2654435761u) ^ (z * 805459861u);
            idx &= (T - 1);
        }
        return offset_ + (level * T + idx) * spec_.features;
    }

    void interpolate(const EvalCtx& ctx, const uint32_t* idx, const double* w, uint32_t F, double* out) const {
        const double* vals = ctx.store->values_data();
        for (uint32_t f = 0; f < F; ++f) {
            double acc = 0.0;
            for (uint32_t c = 0; c < 8; ++c) acc += w[c] * vals[idx[c] + f];
            out[f] = acc;
        }
    }

    void interpolate(const GradCtx& ctx, const uint32_t* idx, const double* w, uint32_t F, Var* out) const {
        Tape* t = ctx.tape;
        for (uint32_t f = 0; f < F; ++f) {
            t->begin_node();
            double acc = 0.0;
            for (uint32_t c = 0; c < 8; ++c) {
                Var leaf = t->leaf(idx[c] + f);
                acc += w[c] * leaf.v;
                t->push_arg(leaf, w[c]);
            }
            out[f] = t->finish_node(acc);
        }
    }

    HashGridSpec spec_;
    Aabb bounds_;
    std::vector<uint32_t> level_res_;
    uint32_t offset_ = 0;
};

}  // namespace invren
