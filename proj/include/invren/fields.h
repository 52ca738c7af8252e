// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "invren/hashgrid.h"
#include "invren/mlp.h"
#include "invren/vec.h"

namespace invren {

template <class R>
struct MaterialSample {
    TVec3<R> kd;
    R metallic;
    R roughness;
};

struct IntrinsicFieldConfig {
    HashGridSpec grid;
    uint32_t mlp_hidden = 64;
    uint32_t mlp_layers = 2;
    // Fixed analytic sphere added to the SDF head so a fresh network starts
    // from a valid surface instead of a constant field.
    bool geometric_init = true;
    Vec3 geom_center{0.0, 0.0, 0.0};
    double geom_radius = 0.6;
    double kappa_init = 10.0 / 3.0;  // 1/kappa ~ 0.3 scene units
    double grad_step = 5e-3;         // spatial step for SDF finite differences
};

// Shared hash encoding feeding three heads: signed distance, normal and
// material. kappa (the density sharpness) lives here as exp(kappa_tilde).
class IntrinsicField {
public:
    IntrinsicField() = default;
    IntrinsicField(const IntrinsicFieldConfig& cfg, const Aabb& bounds)
        : cfg_(cfg),
          bounds_(bounds),
          grid_(cfg.grid, bounds),
          sdf_head_(cfg.grid.levels * cfg.grid.features, cfg.mlp_hidden, 1, cfg.mlp_layers),
          norm_head_(cfg.grid.levels * cfg.grid.features, cfg.mlp_hidden, 3, cfg.mlp_layers),
          mat_head_(cfg.grid.levels * cfg.grid.features, cfg.mlp_hidden, 5, cfg.mlp_layers) {}

    void register_params(ParameterStore& store) {
        grid_.register_params(store, "intrinsic.grid");
        sdf_head_.register_params(store, "intrinsic.sdf");
        norm_head_.register_params(store, "intrinsic.normal");
        mat_head_.register_params(store, "intrinsic.material");
        kappa_idx_ = store.add_segment("intrinsic.kappa", 1);
    }

    void init(ParameterStore& store, Rng& rng) const {
        grid_.init(store, rng);
        sdf_head_.init(store, rng);
        norm_head_.init(store, rng);
        mat_head_.init(store, rng);
        store.set_value(kappa_idx_, std::log(cfg_.kappa_init));
    }

    const Aabb& bounds() const { return bounds_; }
    const IntrinsicFieldConfig& config() const { return cfg_; }
    const HashGrid& grid() const { return grid_; }
    uint32_t kappa_param() const { return kappa_idx_; }

    template <EvalContext Ctx>
    typename Ctx::R kappa(const Ctx& ctx) const {
        return exp(ctx.param(kappa_idx_));
    }

    template <EvalContext Ctx>
    typename Ctx::R sdf(const Ctx& ctx, const Vec3& x, bool* oob = nullptr) const {
        using R = typename Ctx::R;
        R enc[kMaxEnc];
        grid_.encode(ctx, x, enc, oob);
        R out[1];
        sdf_head_.eval(ctx, std::span<const R>(enc, grid_.output_dim()), std::span<R>(out, 1));
        if (cfg_.geometric_init) {
            Vec3 rel = x - cfg_.geom_center;
            return out[0] + R(length(rel) - cfg_.geom_radius);
        }
        return out[0];
    }

    // Spatial SDF gradient by central differences; differentiable w.r.t.
    // parameters (each shifted evaluation is an ordinary recorded eval).
    template <EvalContext Ctx>
    TVec3<typename Ctx::R> sdf_spatial_gradient(const Ctx& ctx, const Vec3& x) const {
        using R = typename Ctx::R;
        const double h = cfg_.grad_step;
        TVec3<R> g;
        for (int a = 0; a < 3; ++a) {
            Vec3 xp = x, xm = x;
            xp[a] += h;
            xm[a] -= h;
            R sp = sdf(ctx, xp);
            R sm = sdf(ctx, xm);
            g[a] = (sp - sm) / R(2.0 * h);
        }
        return g;
    }

    // Unit normal from the SD field, -grad/|grad|. Degenerate gradients
    // fall back to +z and raise the flag.
    template <EvalContext Ctx>
    TVec3<typename Ctx::R> sdf_normal(const Ctx& ctx, const Vec3& x, bool* degenerate = nullptr) const {
        using R = typename Ctx::R;
        TVec3<R> g = sdf_spatial_gradient(ctx, x);
        double len = std::sqrt(detach(g.x) * detach(g.x) + detach(g.y) * detach(g.y) + detach(g.z) * detach(g.z));
        if (len < kDegenerateEps) {
            if (degenerate) *degenerate = true;
            return {R(0.0), R(0.0), R(1.0)};
        }
        if (degenerate) *degenerate = false;
        R inv_len = R(1.0) / length(g);
        return {-g.x * inv_len, -g.y * inv_len, -g.z * inv_len};
    }

    template <EvalContext Ctx>
    TVec3<typename Ctx::R> normal_field(const Ctx& ctx, const Vec3& x, bool* degenerate = nullptr) const {
        using R = typename Ctx::R;
        R enc[kMaxEnc];
        grid_.encode(ctx, x, enc);
        R raw[3];
        norm_head_.eval(ctx, std::span<const R>(enc, grid_.output_dim()), std::span<R>(raw, 3));
        double len = std::sqrt(detach(raw[0]) * detach(raw[0]) + detach(raw[1]) * detach(raw[1]) +
                               detach(raw[2]) * detach(raw[2]));
        if (len < kDegenerateEps) {
            if (degenerate) *degenerate = true;
            return {R(0.0), R(0.0), R(1.0)};
        }
        if (degenerate) *degenerate = false;
        TVec3<R> v{raw[0], raw[1], raw[2]};
        R inv_len = R(1.0) / length(v);
        return {v.x * inv_len, v.y * inv_len, v.z * inv_len};
    }

    // Base color in [0,1]^3 and (metallic, roughness) in [0,1]^2, sigmoid
    // squashed so gradients stay alive at the range limits.
    template <EvalContext Ctx>
    MaterialSample<typename Ctx::R> material(const Ctx& ctx, const Vec3& x) const {
        using R = typename Ctx::R;
        R enc[kMaxEnc];
        grid_.encode(ctx, x, enc);
        R raw[5];
        mat_head_.eval(ctx, std::span<const R>(enc, grid_.output_dim()), std::span<R>(raw, 5));
        MaterialSample<R> m;
        m.kd = {sigmoid(raw[0]), sigmoid(raw[1]), sigmoid(raw[2])};
        m.metallic = sigmoid(raw[3]);
        m.roughness = sigmoid(raw[4]);
        return m;
    }

    static constexpr double kDegenerateEps = 1e-8;
    static constexpr uint32_t kMaxEnc = 64;

private:
    IntrinsicFieldConfig cfg_;
    Aabb bounds_;
    HashGrid grid_;
    Mlp sdf_head_, norm_head_, mat_head_;
    uint32_t kappa_idx_ = 0;
};

struct SkyConfig {
    uint32_t hidden = 256;
    uint32_t layers = 4;
    uint32_t octaves = 6;
};

// HDR directional emitter at infinity: frequency-encoded MLP over the unit
// direction with exponential output, one instance per illumination condition.
class SkyDome {
public:
    SkyDome() = default;
    SkyDome(const SkyConfig& cfg, uint32_t index)
        : cfg_(cfg), index_(index), net_(freq_encode_dim(cfg.octaves), cfg.hidden, 3, cfg.layers) {}

    void register_params(ParameterStore& store) {
        net_.register_params(store, "sky." + std::to_string(index_));
    }
    void init(ParameterStore& store, Rng& rng) const { net_.init(store, rng); }

    template <EvalContext Ctx>
    TVec3<typename Ctx::R> radiance(const Ctx& ctx, const Vec3& d) const {
        using R = typename Ctx::R;
        R enc[kMaxEnc];
        freq_encode(d.x, d.y, d.z, cfg_.octaves, enc);
        R out[3];
        net_.eval(ctx, std::span<const R>(enc, freq_encode_dim(cfg_.octaves)), std::span<R>(out, 3));
        return {exp(out[0]), exp(out[1]), exp(out[2])};
    }

    uint32_t index() const { return index_; }
    const SkyConfig& config() const { return cfg_; }

    static constexpr uint32_t kMaxEnc = 64;

private:
    SkyConfig cfg_;
    uint32_t index_ = 0;
    Mlp net_;
};

struct RadianceConfig {
    HashGridSpec grid;
    uint32_t hidden = 64;
    uint32_t layers = 2;
    uint32_t dir_octaves = 4;
};

// Auxiliary radiance field used only to supervise geometry; discarded after
// optimization. Output is softplus-activated HDR radiance.
class RadianceField {
public:
    RadianceField() = default;
    RadianceField(const RadianceConfig& cfg, const Aabb& bounds)
        : cfg_(cfg),
          grid_(cfg.grid, bounds),
          net_(cfg.grid.levels * cfg.grid.features + freq_encode_dim(cfg.dir_octaves), cfg.hidden, 3, cfg.layers) {}

    void register_params(ParameterStore& store) {
        grid_.register_params(store, "radiance.grid");
        net_.register_params(store, "radiance.mlp");
    }
    void init(ParameterStore& store, Rng& rng) const {
        grid_.init(store, rng);
        net_.init(store, rng);
    }

    template <EvalContext Ctx>
    TVec3<typename Ctx::R> radiance(const Ctx& ctx, const Vec3& x, const Vec3& d) const {
        using R = typename Ctx::R;
        R enc[IntrinsicField::kMaxEnc + 64];
        grid_.encode(ctx, x, enc);
        freq_encode(d.x, d.y, d.z, cfg_.dir_octaves, enc + grid_.output_dim());
        R out[3];
        const uint32_t dim = grid_.output_dim() + freq_encode_dim(cfg_.dir_octaves);
        net_.eval(ctx, std::span<const R>(enc, dim), std::span<R>(out, 3));
        return {softplus(out[0]), softplus(out[1]), softplus(out[2])};
    }

private:
    RadianceConfig cfg_;
    HashGrid grid_;
    Mlp net_;
};

// Per-image exposure compensation, stored as log-gains so raw values stay
// positive. Normalization divides by the per-channel mean across images.
class ExposureSet {
public:
    ExposureSet() = default;
    explicit ExposureSet(uint32_t n_images) : n_(n_images) {}

    void register_params(ParameterStore& store) { offset_ = store.add_segment("exposure", 3 * n_); }
    void init(ParameterStore& store) const {
        for (uint32_t i = 0; i < 3 * n_; ++i) store.set_value(offset_ + i, 0.0);  // raw gain 1
    }

    uint32_t image_count() const { return n_; }
    uint32_t offset() const { return offset_; }

    template <EvalContext Ctx>
    TVec3<typename Ctx::R> raw(const Ctx& ctx, uint32_t image) const {
        using R = typename Ctx::R;
        return {exp(ctx.param(offset_ + 3 * image + 0)), exp(ctx.param(offset_ + 3 * image + 1)),
                exp(ctx.param(offset_ + 3 * image + 2))};
    }

    // beta_i = raw_i / mean(raw) per channel; with one image this is exactly 1.
    template <EvalContext Ctx>
    TVec3<typename Ctx::R> normalized(const Ctx& ctx, uint32_t image) const {
        using R = typename Ctx::R;
        TVec3<R> sum{R(0.0), R(0.0), R(0.0)};
        for (uint32_t i = 0; i < n_; ++i) sum += raw(ctx, i);
        TVec3<R> mine = raw(ctx, image);
        double inv_n = 1.0 / n_;
        return {mine.x / (sum.x * R(inv_n)), mine.y / (sum.y * R(inv_n)), mine.z / (sum.z * R(inv_n))};
    }

private:
    uint32_t n_ = 0;
    uint32_t offset_ = 0;
};

// Standalone exposure normalization used by tests and dataset tooling.
inline std::vector<Vec3> normalize_exposures(const std::vector<Vec3>& raw) {
    Vec3 mean{0, 0, 0};
    for (const auto& b : raw) mean += b;
    mean = mean * (1.0 / static_cast<double>(raw.size()));
    std::vector<Vec3> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) out[i] = {raw[i].x / mean.x, raw[i].y / mean.y, raw[i].z / mean.z};
    return out;
}

// One learnable albedo per semantic class, sigmoid squashed to [0,1]^3.
class SemanticAlbedoSet {
public:
    SemanticAlbedoSet() = default;
    explicit SemanticAlbedoSet(uint32_t n_classes) : n_(n_classes) {}

    void register_params(ParameterStore& store) { offset_ = store.add_segment("semantic_albedo", 3 * n_); }
    void init(ParameterStore& store) const {
        for (uint32_t i = 0; i < 3 * n_; ++i) store.set_value(offset_ + i, 0.0);  // sigmoid(0) = 0.5
    }

    uint32_t class_count() const { return n_; }
    uint32_t offset() const { return offset_; }

    template <EvalContext Ctx>
    TVec3<typename Ctx::R> albedo(const Ctx& ctx, uint32_t cls) const {
        using R = typename Ctx::R;
        return {sigmoid(ctx.param(offset_ + 3 * cls + 0)), sigmoid(ctx.param(offset_ + 3 * cls + 1)),
                sigmoid(ctx.param(offset_ + 3 * cls + 2))};
    }

private:
    uint32_t n_ = 0;
    uint32_t offset_ = 0;
};

}  // namespace invren
