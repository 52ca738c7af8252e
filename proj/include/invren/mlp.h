// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "invren/rng.h"
#include "invren/tape.h"

namespace invren {

// y[j] = b[j] + sum_i W[j*nin+i] * x[i]. The recording overload emits one
// fused tape node per output neuron; both overloads accumulate in identical
// order so values match bit for bit.
inline void affine(const EvalCtx& ctx, uint32_t w_off, uint32_t b_off, const double* x, uint32_t nin, double* y,
                   uint32_t nout) {
    const double* vals = ctx.store->values_data();
    const double* w = vals + w_off;
    const double* b = vals + b_off;
    for (uint32_t j = 0; j < nout; ++j) {
        double acc = b[j];
        const double* wj = w + static_cast<size_t>(j) * nin;
        for (uint32_t i = 0; i < nin; ++i) acc += wj[i] * x[i];
        y[j] = acc;
    }
}

inline void affine(const GradCtx& ctx, uint32_t w_off, uint32_t b_off, const Var* x, uint32_t nin, Var* y,
                   uint32_t nout) {
    Tape* t = ctx.tape;
    const uint32_t w_first = t->leaf_range(w_off, nin * nout);
    const uint32_t b_first = t->leaf_range(b_off, nout);
    const double* vals = t->store()->values_data();
    const double* w = vals + w_off;
    const double* b = vals + b_off;
    for (uint32_t j = 0; j < nout; ++j) {
        t->begin_node();
        double acc = b[j];
        const double* wj = w + static_cast<size_t>(j) * nin;
        const uint32_t wj_first = w_first + j * nin;
        for (uint32_t i = 0; i < nin; ++i) {
            acc += wj[i] * x[i].v;
            t->push_arg(x[i], wj[i]);
            t->push_arg(Var(t, wj_first + i, wj[i]), x[i].v);
        }
        t->push_arg(Var(t, b_first + j, b[j]), 1.0);
        y[j] = t->finish_node(acc);
    }
}

// Fully connected network: `layers` weight matrices, ReLU between them,
// linear output. Heads apply their own output activations.
class Mlp {
public:
    static constexpr uint32_t kMaxWidth = 256;

    Mlp() = default;
    Mlp(uint32_t in, uint32_t hidden, uint32_t out, uint32_t layers) : in_(in), hidden_(hidden), out_(out), layers_(layers) {}

    uint32_t param_count() const {
        if (layers_ == 1) return out_ * in_ + out_;
        uint32_t n = hidden_ * in_ + hidden_;                      // input layer
        n += (layers_ - 2) * (hidden_ * hidden_ + hidden_);        // inner layers
        n += out_ * hidden_ + out_;                                // output layer
        return n;
    }

    uint32_t in_dim() const { return in_; }
    uint32_t out_dim() const { return out_; }
    uint32_t hidden_dim() const { return hidden_; }
    uint32_t layer_count() const { return layers_; }

    void register_params(ParameterStore& store, const std::string& name) {
        offset_ = store.add_segment(name, param_count());
    }

    // Kaiming-uniform weights, zero biases.
    void init(ParameterStore& store, Rng& rng) const {
        uint32_t p = offset_;
        for (uint32_t l = 0; l < layers_; ++l) {
            const uint32_t nin = (l == 0) ? in_ : hidden_;
            const uint32_t nout = (l + 1 == layers_) ? out_ : hidden_;
            const double bound = std::sqrt(6.0 / nin);
            for (uint32_t i = 0; i < nin * nout; ++i) store.set_value(p++, (2.0 * rng.next_double() - 1.0) * bound);
            for (uint32_t i = 0; i < nout; ++i) store.set_value(p++, 0.0);
        }
    }

    template <EvalContext Ctx>
    void eval(const Ctx& ctx, std::span<const typename Ctx::R> in, std::span<typename Ctx::R> out) const {
        using R = typename Ctx::R;
        R buf_a[kMaxWidth], buf_b[kMaxWidth];
        const R* x = in.data();
        R* y = buf_a;
        uint32_t nin = in_;
        uint32_t p = offset_;
        for (uint32_t l = 0; l < layers_; ++l) {
            const bool last = (l + 1 == layers_);
            const uint32_t nout = last ? out_ : hidden_;
            R* dst = last ? out.data() : y;
            affine(ctx, p, p + nin * nout, x, nin, dst, nout);
            p += nin * nout + nout;
            if (!last) {
                for (uint32_t j = 0; j < nout; ++j) dst[j] = relu(dst[j]);
                x = dst;
                y = (dst == buf_a) ? buf_b : buf_a;
                nin = nout;
            }
        }
    }

    uint32_t offset() const { return offset_; }

private:
    uint32_t in_ = 0, hidden_ = 0, out_ = 0, layers_ = 1;
    uint32_t offset_ = 0;
};

// NeRF-style frequency encoding of a 3-vector: the raw components followed
// by sin/cos pairs at octave scales 2^k * pi. Output size 3 + 6*octaves.
inline uint32_t freq_encode_dim(uint32_t octaves) { return 3 + 6 * octaves; }

template <class R>
inline void freq_encode(double x, double y, double z, uint32_t octaves, R* out) {
    out[0] = R(x);
    out[1] = R(y);
    out[2] = R(z);
    uint32_t k = 3;
    double scale = 3.14159265358979323846;
    for (uint32_t o = 0; o < octaves; ++o) {
        out[k++] = R(std::sin(scale * x));
        out[k++] = R(std::sin(scale * y));
        out[k++] = R(std::sin(scale * z));
        out[k++] = R(std::cos(scale * x));
        out[k++] = R(std::cos(scale * y));
        out[k++] = R(std::cos(scale * z));
        scale *= 2.0;
    }
}

}  // namespace invren
