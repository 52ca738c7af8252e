// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "invren/param_store.h"

namespace invren {

class Tape;

// Handle to a recorded scalar. A Var with tape == nullptr is a constant and
// records nothing. Values are cached in the handle so arithmetic does not
// chase the tape on every read.
struct Var {
    Tape* tape = nullptr;
    uint32_t id = 0;
    double v = 0.0;

    Var() = default;
    Var(double constant) : v(constant) {}  // implicit: constants fold silently
    Var(Tape* t, uint32_t i, double val) : tape(t), id(i), v(val) {}

    bool is_const() const { return tape == nullptr; }
    double value() const { return v; }
};

// Reverse-mode tape: a list of recorded operations with local partials.
// Replaying the list backwards accumulates the chain-rule gradient of the
// final scalar into the owning ParameterStore. One tape per worker; never
// shared across threads.
class Tape {
public:
    explicit Tape(ParameterStore* store) : store_(store) {}

    ParameterStore* store() const { return store_; }

    // Parameter leaf. Duplicate leaves for the same parameter are legal;
    // each contributes its adjoint on backward.
    Var leaf(uint32_t param_index) {
        require_live();
        double v = store_->value(param_index);  // throws on unregistered access
        uint32_t id = new_var(v);
        leaves_.push_back({param_index, id});
        return Var(this, id, v);
    }

    // Contiguous block of parameter leaves, memoized per tape so MLP weight
    // matrices are materialized once per recording. Returns the first var id.
    uint32_t leaf_range(uint32_t offset, uint32_t n) {
        require_live();
        auto it = range_cache_.find(offset);
        if (it != range_cache_.end()) return it->second;
        if (offset + n > store_->size()) throw std::out_of_range("Tape: unregistered parameter range");
        uint32_t first = static_cast<uint32_t>(values_.size());
        const double* vals = store_->values_data() + offset;
        values_.insert(values_.end(), vals, vals + n);
        leaves_.reserve(leaves_.size() + n);
        for (uint32_t i = 0; i < n; ++i) leaves_.push_back({offset + i, first + i});
        range_cache_.emplace(offset, first);
        return first;
    }

    Var var(uint32_t id) const { return Var(const_cast<Tape*>(this), id, values_[id]); }

    // --- node construction -------------------------------------------------

    Var unary(double value, const Var& a, double pa) {
        if (a.is_const()) return Var(value);
        begin_node();
        push_arg(a, pa);
        return finish_node(value);
    }

    Var binary(double value, const Var& a, double pa, const Var& b, double pb) {
        if (a.is_const() && b.is_const()) return Var(value);
        begin_node();
        push_arg(a, pa);
        push_arg(b, pb);
        return finish_node(value);
    }

    // n-ary builder for fused ops (dot products, interpolation stencils).
    void begin_node() {
        require_live();
        pending_begin_ = static_cast<uint32_t>(arg_var_.size());
    }
    void push_arg(const Var& a, double partial) {
        if (a.is_const()) return;
        arg_var_.push_back(a.id);
        arg_partial_.push_back(partial);
    }
    Var finish_node(double value) {
        uint32_t n = static_cast<uint32_t>(arg_var_.size()) - pending_begin_;
        if (n == 0) return Var(value);
        uint32_t id = new_var(value);
        nodes_.push_back({id, pending_begin_, n});
        return Var(this, id, value);
    }

    // --- replay -------------------------------------------------------------

    // Accumulates seed * d(result)/d(theta) into the store's gradients.
    // May be called repeatedly; each call is an independent linear replay.
    void backward(const Var& result, double seed) {
        require_live();
        if (result.is_const() || seed == 0.0) return;
        if (result.tape != this) throw std::logic_error("Tape: result recorded on a different tape");
        adjoint_.assign(values_.size(), 0.0);
        adjoint_[result.id] = seed;
        for (size_t k = nodes_.size(); k-- > 0;) {
            const Node& node = nodes_[k];
            double a = adjoint_[node.out];
            if (a == 0.0) continue;
            for (uint32_t j = 0; j < node.n_args; ++j)
                adjoint_[arg_var_[node.arg_begin + j]] += a * arg_partial_[node.arg_begin + j];
        }
        std::lock_guard<std::mutex> lock(store_->grad_mutex());
        for (const auto& [param, var] : leaves_) store_->add_grad(param, adjoint_[var]);
    }

    // Clears recorded state for reuse. Vars from before the reset are stale.
    void reset() {
        require_live();
        values_.clear();
        adjoint_.clear();
        nodes_.clear();
        arg_var_.clear();
        arg_partial_.clear();
        leaves_.clear();
        range_cache_.clear();
    }

    // Frees storage and marks the tape consumed; backward afterwards is an error.
    void release() {
        reset();
        values_.shrink_to_fit();
        nodes_.shrink_to_fit();
        arg_var_.shrink_to_fit();
        arg_partial_.shrink_to_fit();
        consumed_ = true;
    }

    bool consumed() const { return consumed_; }
    size_t node_count() const { return nodes_.size(); }
    size_t var_count() const { return values_.size(); }

private:
    struct Node {
        uint32_t out;
        uint32_t arg_begin;
        uint32_t n_args;
    };

    void require_live() const {
        if (consumed_) throw std::logic_error("Tape: use after release (consumed tape)");
    }

    uint32_t new_var(double v) {
        values_.push_back(v);
        return static_cast<uint32_t>(values_.size() - 1);
    }

    ParameterStore* store_;
    std::vector<double> values_;
    std::vector<double> adjoint_;
    std::vector<Node> nodes_;
    std::vector<uint32_t> arg_var_;
    std::vector<double> arg_partial_;
    std::vector<std::pair<uint32_t, uint32_t>> leaves_;  // (param index, var id)
    std::unordered_map<uint32_t, uint32_t> range_cache_;
    uint32_t pending_begin_ = 0;
    bool consumed_ = false;
};

// --- Var arithmetic ----------------------------------------------------------

namespace detail {
inline Tape* tape_of(const Var& a, const Var& b) {
    Tape* t = a.tape ? a.tape : b.tape;
    assert(!(a.tape && b.tape && a.tape != b.tape) && "Vars from different tapes");
    return t;
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
    Tape* t = detail::tape_of(a, b);
    if (!t) return Var(a.v + b.v);
    return t->binary(a.v + b.v, a, 1.0, b, 1.0);
}
inline Var operator-(const Var& a, const Var& b) {
    Tape* t = detail::tape_of(a, b);
    if (!t) return Var(a.v - b.v);
    return t->binary(a.v - b.v, a, 1.0, b, -1.0);
}
inline Var operator*(const Var& a, const Var& b) {
    Tape* t = detail::tape_of(a, b);
    if (!t) return Var(a.v * b.v);
    return t->binary(a.v * b.v, a, b.v, b, a.v);
}
inline Var operator/(const Var& a, const Var& b) {
    Tape* t = detail::tape_of(a, b);
    double inv = 1.0 / b.v;
    if (!t) return Var(a.v * inv);
    return t->binary(a.v * inv, a, inv, b, -a.v * inv * inv);
}
inline Var operator-(const Var& a) { return a.is_const() ? Var(-a.v) : a.tape->unary(-a.v, a, -1.0); }

inline Var& operator+=(Var& a, const Var& b) { a = a + b; return a; }
inline Var& operator-=(Var& a, const Var& b) { a = a - b; return a; }
inline Var& operator*=(Var& a, const Var& b) { a = a * b; return a; }

inline bool operator<(const Var& a, const Var& b) { return a.v < b.v; }
inline bool operator>(const Var& a, const Var& b) { return a.v > b.v; }

// Transcendentals. Plain double overloads are picked by templated code
// running in the non-recording path; the operation order is identical so
// recorded forward values match plain evaluation bit for bit.
inline Var sin(const Var& a) { return a.is_const() ? Var(std::sin(a.v)) : a.tape->unary(std::sin(a.v), a, std::cos(a.v)); }
inline Var cos(const Var& a) { return a.is_const() ? Var(std::cos(a.v)) : a.tape->unary(std::cos(a.v), a, -std::sin(a.v)); }
inline Var exp(const Var& a) {
    double e = std::exp(a.v);
    return a.is_const() ? Var(e) : a.tape->unary(e, a, e);
}
inline Var log(const Var& a) { return a.is_const() ? Var(std::log(a.v)) : a.tape->unary(std::log(a.v), a, 1.0 / a.v); }
inline Var sqrt(const Var& a) {
    double s = std::sqrt(a.v);
    return a.is_const() ? Var(s) : a.tape->unary(s, a, s > 0.0 ? 0.5 / s : 0.0);
}
inline Var pow(const Var& a, double e) {
    double p = std::pow(a.v, e);
    return a.is_const() ? Var(p) : a.tape->unary(p, a, a.v != 0.0 ? e * p / a.v : 0.0);
}

// Subgradient 0 at the kink for |x| and relu-style clamps; keeps FD checks
// well-defined away from kinks.
inline Var abs(const Var& a) {
    double d = a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0);
    return a.is_const() ? Var(std::abs(a.v)) : a.tape->unary(std::abs(a.v), a, d);
}
inline double abs(double a) { return std::fabs(a); }  // shadow ::abs(int)
inline Var max0(const Var& a) {
    double d = a.v > 0.0 ? 1.0 : 0.0;
    return a.is_const() ? Var(std::max(a.v, 0.0)) : a.tape->unary(std::max(a.v, 0.0), a, d);
}
inline double max0(double a) { return a > 0.0 ? a : 0.0; }

inline Var relu(const Var& a) { return max0(a); }
inline double relu(double a) { return max0(a); }

inline Var sigmoid(const Var& a) {
    double s = 1.0 / (1.0 + std::exp(-a.v));
    return a.is_const() ? Var(s) : a.tape->unary(s, a, s * (1.0 - s));
}
inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

inline Var softplus(const Var& a) {
    double sp = a.v > 30.0 ? a.v : std::log1p(std::exp(a.v));
    return a.is_const() ? Var(sp) : a.tape->unary(sp, a, 1.0 / (1.0 + std::exp(-a.v)));
}
inline double softplus(double a) { return a > 30.0 ? a : std::log1p(std::exp(a)); }

inline Var acos_clamped(const Var& a, double eps = 1e-7) {
    double c = std::clamp(a.v, -1.0 + eps, 1.0 - eps);
    double val = std::acos(c);
    if (a.is_const()) return Var(val);
    double d = (a.v <= -1.0 + eps || a.v >= 1.0 - eps) ? 0.0 : -1.0 / std::sqrt(1.0 - c * c);
    return a.tape->unary(val, a, d);
}
inline double acos_clamped(double a, double eps = 1e-7) { return std::acos(std::clamp(a, -1.0 + eps, 1.0 - eps)); }

// Clamp with pass-through gradient inside the range, 0 outside.
inline Var clamp01(const Var& a) {
    double c = std::clamp(a.v, 0.0, 1.0);
    if (a.is_const()) return Var(c);
    double d = (a.v > 0.0 && a.v < 1.0) ? 1.0 : 0.0;
    return a.tape->unary(c, a, d);
}
inline double clamp01(double a) { return std::clamp(a, 0.0, 1.0); }

inline double detach(double a) { return a; }
inline double detach(const Var& a) { return a.v; }

// --- evaluation contexts ------------------------------------------------------

// Plain evaluation: reads parameter values directly, records nothing.
struct EvalCtx {
    using R = double;
    const ParameterStore* store;

    explicit EvalCtx(const ParameterStore& s) : store(&s) {}
    double param(uint32_t i) const { return store->value(i); }
    const ParameterStore& params() const { return *store; }
};

// Recording evaluation: every parameter access becomes a leaf, every
// operation a tape node.
struct GradCtx {
    using R = Var;
    Tape* tape;

    explicit GradCtx(Tape& t) : tape(&t) {}
    Var param(uint32_t i) const { return tape->leaf(i); }
    const ParameterStore& params() const { return *tape->store(); }
};

template <class Ctx>
concept EvalContext = requires(const Ctx& c, uint32_t i) {
    typename Ctx::R;
    c.param(i);
};

// forward_record: evaluate `expr(GradCtx)` on a fresh recording, returning
// the scalar result. The recorded value equals plain evaluation bit for bit
// because both paths execute the same templated expression code.
template <class F>
Var forward_record(Tape& tape, F&& expr) {
    tape.reset();
    GradCtx ctx(tape);
    return expr(ctx);
}

}  // namespace invren
