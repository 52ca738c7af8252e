// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "invren/fields.h"
#include "invren/vec.h"

namespace invren {

struct Ray {
    Vec3 o;
    Vec3 d;  // unit length
    double tn = 0.0;
    double tf = 0.0;
};

struct SamplingConfig {
    uint32_t n_uniform = 512;
    uint32_t n_adaptive = 64;
    double alpha_min = 0.5;  // pixels with accumulated alpha below this are background
    // Segments whose compositing weight falls below this fraction of the
    // total skip their payload evaluation (value and gradient contributions
    // are negligible). 0 evaluates everything.
    double payload_weight_cutoff = 0.0;
};

// Continuous NeuS density: rho = max(-(dPhi_k/dt)(s) / Phi_k(s), 0) with
// Phi_k the sigmoid of sharpness kappa. Retained for tests and as the
// reference form of the discrete alpha below.
inline double sdf_to_density(double s, double ds_dt, double kappa) {
    const double phi = sigmoid(kappa * s);
    const double dphi_dt = kappa * phi * (1.0 - phi) * ds_dt;
    return max0(-dphi_dt / phi);
}

// Discrete segment opacity between consecutive SDF samples.
template <class R>
inline R segment_alpha(const R& s_j, const R& s_next, const R& kappa) {
    R phi_j = sigmoid(kappa * s_j);
    if (detach(phi_j) < 1e-300) return R(0.0);
    R phi_next = sigmoid(kappa * s_next);
    return max0((phi_j - phi_next) / phi_j);
}

// Front-to-back compositing weights w_j = T_j * alpha_j with
// T_j = prod_{k<j} (1 - alpha_k). Returns accumulated alpha sum(w).
template <class R>
inline R composite_weights(std::span<const R> alpha, std::span<R> w) {
    R transmittance(1.0);
    R acc(0.0);
    for (size_t j = 0; j < alpha.size(); ++j) {
        w[j] = transmittance * alpha[j];
        acc += w[j];
        transmittance = transmittance * (R(1.0) - alpha[j]);
    }
    return acc;
}

template <class R>
inline R composite(std::span<const R> alpha, std::span<const R> payload, R* accumulated_alpha = nullptr) {
    R transmittance(1.0);
    R value(0.0);
    R acc(0.0);
    for (size_t j = 0; j < alpha.size(); ++j) {
        R w = transmittance * alpha[j];
        value += w * payload[j];
        acc += w;
        transmittance = transmittance * (R(1.0) - alpha[j]);
    }
    if (accumulated_alpha) *accumulated_alpha = acc;
    return value;
}

// Uniformly spaced sample depths (cell midpoints of [tn, tf]).
inline void uniform_depths(const Ray& ray, uint32_t n, std::vector<double>& out) {
    out.resize(n);
    const double dt = (ray.tf - ray.tn) / n;
    for (uint32_t i = 0; i < n; ++i) out[i] = ray.tn + (i + 0.5) * dt;
}

// Draws `n` extra depths from the inverse CDF of the segment weights and
// merges them (sorted) with the input depths. Zero total weight falls back
// to uniform placement. Stratified, deterministic.
void adaptive_resample(const std::vector<double>& depths, const std::vector<double>& weights, uint32_t n,
                       std::vector<double>& merged);

// One G-buffer pixel. `alpha` is tracked alongside the paper-style
// normal/base-color/material/depth payload.
template <class R>
struct GBufferPixel {
    TVec3<R> normal{R(0.0), R(0.0), R(0.0)};  // composited, renormalized over foreground
    TVec3<R> kd{R(0.0), R(0.0), R(0.0)};
    R metallic{0.0};
    R roughness{0.0};
    R depth{0.0};  // radial distance
    R alpha{0.0};
    bool background = true;
    bool degenerate_normal = false;
};

namespace detail {

template <EvalContext Ctx>
void sample_sdf_alphas(const Ctx& ctx, const IntrinsicField& field, const Ray& ray, const SamplingConfig& cfg,
                       std::vector<double>& depths, std::vector<typename Ctx::R>& alphas) {
    using R = typename Ctx::R;
    // Coarse pass (always plain doubles) to place adaptive samples.
    EvalCtx plain(ctx.params());
    std::vector<double> coarse;
    uniform_depths(ray, cfg.n_uniform, coarse);
    const double kappa_plain = detach(field.kappa(plain));
    if (cfg.n_adaptive > 0) {
        std::vector<double> s(coarse.size());
        for (size_t i = 0; i < coarse.size(); ++i) s[i] = field.sdf(plain, ray.o + ray.d * coarse[i]);
        std::vector<double> a(coarse.size() - 1), w(coarse.size() - 1);
        for (size_t j = 0; j + 1 < coarse.size(); ++j) a[j] = segment_alpha(s[j], s[j + 1], kappa_plain);
        composite_weights<double>(a, w);
        adaptive_resample(coarse, w, cfg.n_adaptive, depths);
    } else {
        depths = coarse;
    }
    // Fine pass in the caller's context.
    R kappa = field.kappa(ctx);
    std::vector<R> s(depths.size());
    for (size_t i = 0; i < depths.size(); ++i) s[i] = field.sdf(ctx, ray.o + ray.d * depths[i]);
    alphas.resize(depths.size() - 1);
    for (size_t j = 0; j + 1 < depths.size(); ++j) alphas[j] = segment_alpha(s[j], s[j + 1], kappa);
}

}  // namespace detail

// Volumetric primary-ray rendering of one pixel: composited base color,
// material, normal (renormalized) and radial depth, plus accumulated alpha.
// When `radiance_out` is non-null the auxiliary radiance field is composited
// with the same weights (the SD field is shared).
template <EvalContext Ctx>
GBufferPixel<typename Ctx::R> render_gbuffer_pixel(const Ctx& ctx, const IntrinsicField& field,
                                                   const RadianceField* rad, const Ray& ray,
                                                   const SamplingConfig& cfg,
                                                   TVec3<typename Ctx::R>* radiance_out = nullptr) {
    using R = typename Ctx::R;
    std::vector<double> depths;
    std::vector<R> alphas;
    detail::sample_sdf_alphas(ctx, field, ray, cfg, depths, alphas);

    std::vector<R> w(alphas.size());
    R acc = composite_weights<R>(alphas, w);

    double w_max = 0.0;
    for (const R& wj : w) w_max = std::max(w_max, detach(wj));
    const double cutoff = cfg.payload_weight_cutoff * w_max;

    GBufferPixel<R> px;
    TVec3<R> n_acc{R(0.0), R(0.0), R(0.0)};
    TVec3<R> rad_acc{R(0.0), R(0.0), R(0.0)};
    for (size_t j = 0; j < w.size(); ++j) {
        if (detach(w[j]) <= cutoff && cfg.payload_weight_cutoff > 0.0) continue;
        const double t_mid = 0.5 * (depths[j] + depths[j + 1]);
        const Vec3 xs = ray.o + ray.d * t_mid;
        MaterialSample<R> mat = field.material(ctx, xs);
        TVec3<R> nf = field.normal_field(ctx, xs);
        px.kd += w[j] * mat.kd;
        px.metallic += w[j] * mat.metallic;
        px.roughness += w[j] * mat.roughness;
        n_acc += w[j] * nf;
        px.depth += w[j] * R(t_mid);
        if (rad && radiance_out) rad_acc += w[j] * rad->radiance(ctx, xs, ray.d);
    }
    px.alpha = acc;
    px.background = detach(acc) < cfg.alpha_min;

    const double n_len = std::sqrt(detach(n_acc.x) * detach(n_acc.x) + detach(n_acc.y) * detach(n_acc.y) +
                                   detach(n_acc.z) * detach(n_acc.z));
    if (n_len < IntrinsicField::kDegenerateEps) {
        px.degenerate_normal = true;
        px.normal = {R(0.0), R(0.0), R(1.0)};
    } else {
        R inv = R(1.0) / length(n_acc);
        px.normal = {n_acc.x * inv, n_acc.y * inv, n_acc.z * inv};
    }
    if (radiance_out) *radiance_out = rad_acc;
    return px;
}

// Radiance-only compositing with the shared SD-field weights.
template <EvalContext Ctx>
TVec3<typename Ctx::R> render_radiance_pixel(const Ctx& ctx, const IntrinsicField& field, const RadianceField& rad,
                                             const Ray& ray, const SamplingConfig& cfg,
                                             typename Ctx::R* alpha_out = nullptr) {
    using R = typename Ctx::R;
    std::vector<double> depths;
    std::vector<R> alphas;
    detail::sample_sdf_alphas(ctx, field, ray, cfg, depths, alphas);
    std::vector<R> w(alphas.size());
    R acc = composite_weights<R>(alphas, w);
    double w_max = 0.0;
    for (const R& wj : w) w_max = std::max(w_max, detach(wj));
    const double cutoff = cfg.payload_weight_cutoff * w_max;
    TVec3<R> out{R(0.0), R(0.0), R(0.0)};
    for (size_t j = 0; j < w.size(); ++j) {
        if (detach(w[j]) <= cutoff && cfg.payload_weight_cutoff > 0.0) continue;
        const double t_mid = 0.5 * (depths[j] + depths[j + 1]);
        out += w[j] * rad.radiance(ctx, ray.o + ray.d * t_mid, ray.d);
    }
    if (alpha_out) *alpha_out = acc;
    return out;
}

// Radial depth to perpendicular (camera-plane) depth.
inline double radial_to_planar_depth(double radial, const Vec3& ray_dir, const Vec3& camera_forward) {
    return radial * dot(ray_dir, camera_forward);
}

}  // namespace invren
