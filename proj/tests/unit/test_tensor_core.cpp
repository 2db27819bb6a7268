#include <cmath>
#include <string>
#include <vector>

#include "daelab/adam.hpp"
#include "daelab/errors.hpp"
#include "daelab/ops.hpp"
#include "daelab/rng.hpp"
#include "daelab/tape.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace daelab;
using daelab::testing::gradient_relative_error;
using daelab::testing::LossBuilder;

namespace {

Tensor random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(r * c);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return Tensor::matrix(r, c, std::move(v));
}

// Weighted sum with fixed random weights so every output entry contributes
// differently to the scalar.
Var weighted_sum(Tape& tape, const Var& x, std::uint64_t seed) {
    Rng rng(seed, 99);
    std::vector<double> w(x.value().size());
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    return ops::sum(ops::mul(x, tape.constant(Tensor(x.shape(), std::move(w)))));
}

}  // namespace

TEST_CASE("tensor factories and shapes") {
    const auto z = Tensor::zeros({2, 3});
    CHECK(z.size() == 6);
    CHECK(z.rows() == 2);
    CHECK(z.cols() == 3);
    const auto v = Tensor::vector({1, 2, 3});
    CHECK(v.rows() == 1);
    CHECK(v.cols() == 3);
    CHECK(Tensor::scalar(4.0).item() == 4.0);
    CHECK_THROWS_AS(Tensor::matrix(2, 2, {1, 2, 3}), DimensionError);
    CHECK(shape_string({2, 3}) == "[2x3]");
}

TEST_CASE("matmul examples") {
    Tape tape;
    const auto id = tape.constant(Tensor::matrix(2, 2, {1, 0, 0, 1}));
    const auto m = tape.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
    CHECK(ops::matmul(id, m).value().data == std::vector<double>{1, 2, 3, 4});

    const auto a = tape.constant(Tensor::matrix(1, 2, {1, 2}));
    const auto b = tape.constant(Tensor::matrix(2, 1, {3, 4}));
    const auto ab = ops::matmul(a, b);
    CHECK(ab.value().shape == Shape{1, 1});
    CHECK(ab.value().item() == 11.0);

    CHECK_THROWS_AS(ops::matmul(a, a), DimensionError);
}

TEST_CASE("gradient of sum(A·B) w.r.t. A") {
    Tensor a = Tensor::matrix(1, 2, {1, 1});
    a.requires_grad = true;
    Tape tape;
    const auto va = tape.watch(a);
    const auto vb = tape.constant(Tensor::matrix(2, 1, {2, 5}));
    tape.backward(ops::sum(ops::matmul(va, vb)));
    REQUIRE(a.grad);
    CHECK(*a.grad == std::vector<double>{2, 5});

    // Independent check by central differences.
    const LossBuilder f = [](Tape& t, const std::vector<Var>& in) {
        return ops::sum(ops::matmul(in[0], t.constant(Tensor::matrix(2, 1, {2, 5}))));
    };
    CHECK(gradient_relative_error({Tensor::matrix(1, 2, {1, 1})}, f, 1e-6) < 1e-8);
}

TEST_CASE("elementwise examples") {
    Tape tape;
    CHECK(ops::sigmoid(tape.constant(Tensor::scalar(0.0))).value().item() == 0.5);
    CHECK(std::abs(ops::cos2pi(tape.constant(Tensor::scalar(0.25))).value().item()) < 1e-12);
    CHECK(ops::sin2pi(tape.constant(Tensor::scalar(0.25))).value().item() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ops::leaky_relu(tape.constant(Tensor::scalar(-2.0)), 0.01).value().item() == doctest::Approx(-0.02));
    CHECK(ops::leaky_relu(tape.constant(Tensor::scalar(3.0)), 0.01).value().item() == 3.0);
}

TEST_CASE("reductions") {
    Tape tape;
    const auto x = tape.constant(Tensor::matrix(2, 2, {1, 5, 3, 2}));
    CHECK(ops::per_feature_min(x).value().data == std::vector<double>{1, 2});
    CHECK(ops::per_feature_max(x).value().data == std::vector<double>{3, 5});
    CHECK(ops::mean(tape.constant(Tensor::vector({2, 4}))).value().item() == 3.0);
    CHECK(ops::sum(tape.constant(Tensor::zeros({3, 3}))).value().item() == 0.0);
}

TEST_CASE("per-feature extrema stop the gradient") {
    Tensor x = Tensor::matrix(2, 2, {1, 5, 3, 2});
    x.requires_grad = true;
    Tape tape;
    const auto vx = tape.watch(x);
    tape.backward(ops::sum(ops::add(ops::per_feature_min(vx), ops::per_feature_max(vx))));
    const auto g = x.grad.value_or(std::vector<double>(4, 0.0));
    CHECK(g == std::vector<double>(4, 0.0));
}

TEST_CASE("losses") {
    Tape tape;
    const auto x = tape.constant(Tensor::matrix(1, 3, {0.1, 0.5, 0.9}));
    CHECK(ops::mse_loss(x, x).value().item() == 0.0);
    CHECK(ops::mse_loss(tape.constant(Tensor::vector({0, 2})), tape.constant(Tensor::vector({0, 0}))).value().item() ==
          2.0);
    CHECK(ops::bce_loss(tape.constant(Tensor::scalar(0.5)), tape.constant(Tensor::scalar(1.0))).value().item() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // Clamping keeps saturated predictions finite.
    const double sat = ops::bce_loss(tape.constant(Tensor::scalar(0.0)), tape.constant(Tensor::scalar(1.0))).value().item();
    CHECK(sat == doctest::Approx(-std::log(ops::kBceClamp)));
    CHECK_THROWS_AS(ops::mse_loss(x, tape.constant(Tensor::vector({1, 2}))), DimensionError);
}

TEST_CASE("chain rule: d mse(w·x, y)/dw at w=1, x=2, y=0 is 8") {
    Tensor w = Tensor::scalar(1.0);
    w.requires_grad = true;
    Tape tape;
    const auto vw = tape.watch(w);
    const auto pred = ops::mul(vw, tape.constant(Tensor::scalar(2.0)));
    tape.backward(ops::mse_loss(pred, tape.constant(Tensor::scalar(0.0))));
    CHECK(w.grad->at(0) == doctest::Approx(8.0));
}

TEST_CASE("constants receive no gradient") {
    Tape tape;
    const auto c = tape.constant(Tensor::vector({1, 2}));
    tape.backward(ops::sum(ops::scale(c, 3.0)));
    CHECK(c.grad() == std::vector<double>{0, 0});
}

TEST_CASE("backward requires a scalar") {
    Tape tape;
    const auto c = tape.constant(Tensor::vector({1, 2}));
    CHECK_THROWS_AS(tape.backward(c), ContractError);
}

TEST_CASE("finite-difference check of every differentiable op") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(seed);
        Rng rng(seed);
        const auto a = random_matrix(rng, 3, 4);
        const auto b = random_matrix(rng, 3, 4);
        const auto c = random_matrix(rng, 4, 2);
        const auto bias = Tensor::vector({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
        // Kink of the leaky ReLU kept away from the difference stencil.
        auto away = random_matrix(rng, 3, 4);
        for (auto& v : away.data) v = v < 0 ? std::min(v, -0.05) : std::max(v, 0.05);
        const auto prob = random_matrix(rng, 3, 4, 0.05, 0.95);
        const auto target = random_matrix(rng, 3, 4, 0.0, 1.0);

        auto check = [&](std::string name, std::vector<Tensor> inputs, LossBuilder f) {
            CAPTURE(name);
            CHECK(gradient_relative_error(inputs, f) < 1e-4);
        };
        check("matmul", {a, c}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::matmul(in[0], in[1]), seed); });
        check("add", {a, b}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::add(in[0], in[1]), seed); });
        check("sub", {a, b}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::sub(in[0], in[1]), seed); });
        check("mul", {a, b}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::mul(in[0], in[1]), seed); });
        check("scale", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::scale(in[0], -1.7), seed); });
        check("add_scalar", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::add_scalar(in[0], 0.3), seed); });
        check("leaky_relu", {away}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::leaky_relu(in[0], 0.01), seed); });
        check("sigmoid", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::sigmoid(in[0]), seed); });
        check("sin2pi", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::sin2pi(in[0]), seed); });
        check("cos2pi", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::cos2pi(in[0]), seed); });
        check("exp", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::exp(in[0]), seed); });
        check("add_bias", {a, bias}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::add_bias(in[0], in[1]), seed); });
        check("column_affine", {a}, [&](Tape& t, const std::vector<Var>& in) {
            const std::vector<double> shift{0.1, -0.2, 0.3, 0.0};
            const std::vector<double> factor{2.0, 0.5, -1.0, 3.0};
            return weighted_sum(t, ops::column_affine(in[0], shift, factor), seed);
        });
        check("slice_columns", {a}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::slice_columns(in[0], 1, 3), seed); });
        check("interleave_columns", {a, b}, [&](Tape& t, const std::vector<Var>& in) { return weighted_sum(t, ops::interleave_columns(in[0], in[1]), seed); });
        check("sum", {a}, [&](Tape&, const std::vector<Var>& in) { return ops::sum(in[0]); });
        check("mean", {a}, [&](Tape&, const std::vector<Var>& in) { return ops::mean(in[0]); });
        check("mse_loss", {a, b}, [&](Tape&, const std::vector<Var>& in) { return ops::mse_loss(in[0], in[1]); });
        check("bce_loss", {prob, target}, [&](Tape&, const std::vector<Var>& in) { return ops::bce_loss(in[0], in[1]); });
        check("composite", {a, c, bias}, [&](Tape& t, const std::vector<Var>& in) {
            const auto h = ops::leaky_relu(ops::add_bias(in[0], in[2]), 0.2);
            return ops::mse_loss(ops::sigmoid(ops::matmul(h, in[1])), t.constant(Tensor::filled({3, 2}, 0.5)));
        });
    }
}

TEST_CASE("sin2pi² + cos2pi² = 1") {
    Rng rng(7);
    Tape tape;
    const auto x = tape.constant(random_matrix(rng, 20, 5, -50.0, 50.0));
    const auto s = ops::sin2pi(x).value().data;
    const auto c = ops::cos2pi(x).value().data;
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] * s[i] + c[i] * c[i] - 1.0) < 1e-12);
}

TEST_CASE("tape replay is deterministic") {
    auto run = [] {
        Rng rng(11);
        Tensor w = random_matrix(rng, 4, 3);
        w.requires_grad = true;
        Tape tape;
        const auto x = tape.constant(random_matrix(rng, 5, 4));
        const auto y = ops::sigmoid(ops::matmul(x, tape.watch(w)));
        tape.backward(ops::mean(y));
        return std::make_pair(y.value().data, *w.grad);
    };
    CHECK(run() == run());
}

TEST_CASE("adam: one unit-gradient step moves by the learning rate") {
    Tensor p = Tensor::vector({0.5, -1.0});
    p.grad = std::vector<double>{1.0, 1.0};
    AdamState state;
    std::vector<Tensor*> params{&p};
    adam_step(params, state);
    // m̂ = g, v̂ = g², so the step is lr·g/(|g| + ε).
    CHECK(p.data[0] == doctest::Approx(0.5 - 1e-3 / (1.0 + 1e-8)).epsilon(1e-14));
    CHECK(p.data[1] == doctest::Approx(-1.0 - 1e-3 / (1.0 + 1e-8)).epsilon(1e-14));
    CHECK(*p.grad == std::vector<double>{0.0, 0.0});
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Tensor p = Tensor::vector({0.5, -1.0});
    p.grad = std::vector<double>{0.0, 0.0};
    AdamState state;
    std::vector<Tensor*> params{&p};
    for (int i = 0; i < 3; ++i) adam_step(params, state);
    CHECK(p.data == std::vector<double>{0.5, -1.0});
}

TEST_CASE("adam: missing gradient is a contract error") {
    Tensor p = Tensor::vector({0.5});
    AdamState state;
    std::vector<Tensor*> params{&p};
    CHECK_THROWS_AS(adam_step(params, state), ContractError);
}

TEST_CASE("adam: identical runs are bit-identical") {
    auto run = [] {
        Rng rng(3);
        Tensor w = random_matrix(rng, 3, 2);
        w.requires_grad = true;
        AdamState state;
        std::vector<Tensor*> params{&w};
        for (int step = 0; step < 10; ++step) {
            Tape tape;
            const auto x = tape.constant(random_matrix(rng, 4, 3));
            tape.backward(ops::mse_loss(ops::matmul(x, tape.watch(w)), tape.constant(Tensor::zeros({4, 2}))));
            adam_step(params, state);
        }
        return w.data;
    };
    CHECK(run() == run());
}

TEST_CASE("rng streams") {
    Rng a(5, RngStream::init);
    Rng b(5, RngStream::init);
    Rng c(5, RngStream::shuffle);
    std::vector<std::uint64_t> da, db, dc;
    for (int i = 0; i < 8; ++i) {
        da.push_back(a.next_u64());
        db.push_back(b.next_u64());
        dc.push_back(c.next_u64());
    }
    CHECK(da == db);
    CHECK(da != dc);

    Rng u(1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = u.uniform();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        CHECK(u.below(7) < 7);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);

    auto perm = Rng(2).permutation(50);
    std::sort(perm.begin(), perm.end());
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(perm[i] == i);
}

TEST_CASE("normal draws have unit moments") {
    Rng rng(9);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - mean * mean - 1.0) < 0.02);
}
