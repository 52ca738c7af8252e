// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invren/fdcheck.h"
#include "invren/tape.h"

using namespace invren;

namespace {

ParameterStore make_store(std::initializer_list<double> vals) {
    ParameterStore s;
    s.add_segment("theta", static_cast<uint32_t>(vals.size()));
    uint32_t i = 0;
    for (double v : vals) s.set_value(i++, v);
    return s;
}

}  // namespace

TEST_CASE("forward_record: value matches plain evaluation bit for bit") {
    ParameterStore store = make_store({3.0});
    auto expr = [](auto& ctx) { auto t = ctx.param(0); return t * t; };

    EvalCtx plain(store);
    double direct = expr(plain);
    CHECK(direct == 9.0);

    Tape tape(&store);
    Var y = forward_record(tape, expr);
    CHECK(y.value() == direct);
    CHECK(tape.node_count() > 0);
}

TEST_CASE("forward_record: constant expression leaves empty tape") {
    ParameterStore store = make_store({1.0});
    Tape tape(&store);
    Var y = forward_record(tape, [](auto&) { return Var(5.0); });
    CHECK(y.value() == 5.0);
    CHECK(y.is_const());
    CHECK(tape.node_count() == 0);
}

TEST_CASE("forward_record: sigmoid at zero") {
    ParameterStore store = make_store({0.0});
    Tape tape(&store);
    Var y = forward_record(tape, [](auto& ctx) { return sigmoid(ctx.param(0)); });
    CHECK(y.value() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("forward_record: unregistered parameter access is a hard error") {
    ParameterStore store = make_store({1.0});
    Tape tape(&store);
    CHECK_THROWS_AS(forward_record(tape, [](auto& ctx) { return ctx.param(7); }), std::out_of_range);
}

TEST_CASE("backward: power rule") {
    ParameterStore store = make_store({3.0});
    Tape tape(&store);
    Var y = forward_record(tape, [](auto& ctx) { auto t = ctx.param(0); return t * t; });
    tape.backward(y, 1.0);
    CHECK(store.grad(0) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("backward: zero seed leaves grads unchanged") {
    ParameterStore store = make_store({2.0});
    store.add_grad(0, 0.25);
    Tape tape(&store);
    Var y = forward_record(tape, [](auto& ctx) { auto t = ctx.param(0); return t * t * t; });
    tape.backward(y, 0.0);
    CHECK(store.grad(0) == 0.25);
}

TEST_CASE("backward: sin at zero") {
    ParameterStore store = make_store({0.0});
    Tape tape(&store);
    Var y = forward_record(tape, [](auto& ctx) { return sin(ctx.param(0)); });
    tape.backward(y, 1.0);
    CHECK(store.grad(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("backward: linearity of seeds is exact") {
    // Seeds split on a power of two so floating-point scaling is exact.
    ParameterStore store = make_store({1.7, -0.3});
    auto expr = [](auto& ctx) {
        auto a = ctx.param(0);
        auto b = ctx.param(1);
        return sin(a * b) + exp(b) * a;
    };
    Tape tape(&store);
    Var y = forward_record(tape, expr);

    tape.backward(y, 0.5);
    tape.backward(y, 0.5);
    double g0 = store.grad(0), g1 = store.grad(1);

    store.zero_grads();
    Tape tape2(&store);
    Var y2 = forward_record(tape2, expr);
    tape2.backward(y2, 1.0);
    CHECK(store.grad(0) == g0);
    CHECK(store.grad(1) == g1);
}

TEST_CASE("backward: released tape is consumed") {
    ParameterStore store = make_store({2.0});
    Tape tape(&store);
    Var y = forward_record(tape, [](auto& ctx) { return ctx.param(0) * ctx.param(0); });
    tape.release();
    CHECK(tape.consumed());
    CHECK_THROWS_AS(tape.backward(y, 1.0), std::logic_error);
}

TEST_CASE("determinism: identical inputs give bit-identical values and grads") {
    auto run = [](double* val, double* grad) {
        ParameterStore store = make_store({0.8, 1.9, -0.4});
        auto expr = [](auto& ctx) {
            auto a = ctx.param(0), b = ctx.param(1), c = ctx.param(2);
            return sigmoid(a * b + c) * sqrt(exp(b) + a * a) - log(b);
        };
        Tape tape(&store);
        Var y = forward_record(tape, expr);
        tape.backward(y, 1.0);
        *val = y.value();
        for (int i = 0; i < 3; ++i) grad[i] = store.grad(i);
    };
    double v1, v2, g1[3], g2[3];
    run(&v1, g1);
    run(&v2, g2);
    CHECK(v1 == v2);
    for (int i = 0; i < 3; ++i) CHECK(g1[i] == g2[i]);
}

TEST_CASE("fused n-ary node matches scalar composition") {
    ParameterStore store = make_store({0.5, -1.5, 2.5, 0.25, 1.0, -0.75});
    // dot(x, w) recorded as one node vs. elementwise products.
    Tape tape(&store);
    GradCtx ctx(tape);
    Var x0 = ctx.param(0), x1 = ctx.param(1), x2 = ctx.param(2);
    tape.begin_node();
    double acc = 0.0;
    Var w0 = ctx.param(3), w1 = ctx.param(4), w2 = ctx.param(5);
    const Var xs[3] = {x0, x1, x2};
    const Var ws[3] = {w0, w1, w2};
    for (int i = 0; i < 3; ++i) {
        acc += ws[i].v * xs[i].v;
        tape.push_arg(xs[i], ws[i].v);
        tape.push_arg(ws[i], xs[i].v);
    }
    Var fused = tape.finish_node(acc);
    tape.backward(fused, 1.0);
    std::vector<double> fused_grads(store.grads_data(), store.grads_data() + store.size());

    store.zero_grads();
    Tape tape2(&store);
    GradCtx ctx2(tape2);
    Var y = ctx2.param(0) * ctx2.param(3) + ctx2.param(1) * ctx2.param(4) + ctx2.param(2) * ctx2.param(5);
    CHECK(y.value() == fused.value());
    tape2.backward(y, 1.0);
    for (uint32_t i = 0; i < store.size(); ++i) CHECK(store.grad(i) == doctest::Approx(fused_grads[i]).epsilon(1e-15));
}

TEST_CASE("check_gradients_fd: quadratic is exact up to rounding") {
    ParameterStore store = make_store({3.0});
    uint32_t params[1] = {0};
    auto report = check_gradients_fd(
        store, [](auto& ctx) { auto t = ctx.param(0); return t * t; }, params, 1e-4, 1e-6);
    REQUIRE(report.entries.size() == 1);
    CHECK(!report.entries[0].kink);
    CHECK(report.entries[0].rel_err < 1e-6);
    CHECK(report.all_ok());
}

TEST_CASE("check_gradients_fd: |theta| at 0 is flagged as nondifferentiable") {
    ParameterStore store = make_store({0.0});
    uint32_t params[1] = {0};
    auto report = check_gradients_fd(
        store, [](auto& ctx) { return abs(ctx.param(0)); }, params, 1e-4, 1e-3);
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].kink);
}

TEST_CASE("check_gradients_fd: transcendental chain within 1e-6") {
    ParameterStore store = make_store({0.7, -0.2, 1.3});
    uint32_t params[3] = {0, 1, 2};
    auto expr = [](auto& ctx) {
        auto a = ctx.param(0), b = ctx.param(1), c = ctx.param(2);
        return exp(sin(a) * b) + sigmoid(c * a) / sqrt(c + 2.0);
    };
    auto report = check_gradients_fd(store, expr, params, 1e-5, 1e-6);
    CHECK(report.all_ok());
    CHECK(report.checked() == 3);
}

TEST_CASE("check_gradients_fd: restores values and grads") {
    ParameterStore store = make_store({1.5});
    store.add_grad(0, 42.0);
    uint32_t params[1] = {0};
    check_gradients_fd(store, [](auto& ctx) { return ctx.param(0) * 2.0; }, params);
    CHECK(store.value(0) == 1.5);
    CHECK(store.grad(0) == 42.0);
}

TEST_CASE("Var: mixed constant arithmetic records nothing for constants") {
    ParameterStore store = make_store({2.0});
    Tape tape(&store);
    GradCtx ctx(tape);
    Var t = ctx.param(0);
    Var y = t * 3.0 + 1.0;  // constants fold into partials
    tape.backward(y, 1.0);
    CHECK(y.value() == 7.0);
    CHECK(store.grad(0) == 3.0);
}

TEST_CASE("max0 subgradient is 0 at the kink") {
    ParameterStore store = make_store({0.0});
    Tape tape(&store);
    Var y = forward_record(tape, [](auto& ctx) { return max0(ctx.param(0)); });
    tape.backward(y, 1.0);
    CHECK(store.grad(0) == 0.0);
}

TEST_CASE("ParameterStore: segments are disjoint and cover the store") {
    ParameterStore store;
    uint32_t a = store.add_segment("a", 3);
    uint32_t b = store.add_segment("b", 5);
    CHECK(a == 0);
    CHECK(b == 3);
    CHECK(store.size() == 8);
    CHECK(store.segment("b").length == 5);
    CHECK_THROWS(store.add_segment("a", 1));
    uint32_t covered = 0;
    for (const auto& s : store.segments()) covered += s.length;
    CHECK(covered == store.size());
}

TEST_CASE("ParameterStore: zero_grads clears exactly") {
    ParameterStore store = make_store({1.0, 2.0});
    store.add_grad(0, 3.0);
    store.add_grad(1, -1.0);
    store.zero_grads();
    CHECK(store.grad(0) == 0.0);
    CHECK(store.grad(1) == 0.0);
}
