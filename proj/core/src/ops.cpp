#include "daelab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "daelab/errors.hpp"

namespace daelab::ops {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_shape(const char* op, const Var& a, const Var& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                             " vs " + shape_string(b.shape()));
    }
}

void require_matrix(const char* op, const Var& x) {
    if (x.shape().size() != 2) {
        throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_string(x.shape()));
    }
}

// Shared shape of unary elementwise ops: y = f(x), dy/dx = df(x, y).
template <class F, class DF>
Var unary(const Var& x, F f, DF df) {
    Tape& tape = x.tape();
    const Tensor& in = x.value();
    Tensor out(in.shape, std::vector<double>(in.size()));
    for (std::size_t i = 0; i < in.size(); ++i) out.data[i] = f(in.data[i]);
    const auto xid = x.id();
    const auto yid = tape.size();  // id the result is about to receive
    return tape.record(std::move(out), {xid}, [&tape, xid, yid, df](std::span<const double> g) {
        const auto& xv = tape.value(xid).data;
        const auto& yv = tape.value(yid).data;
        auto gx = tape.grad_buffer(xid);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(xv[i], yv[i]);
    });
}

// C[m×n] += A[m×k] · B[k×n]
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            if (av == 0.0) continue;
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[m×k] += G[m×n] · B[k×n]ᵀ
void gemm_nt(const double* g, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double* brow = b + p * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            c[i * k + p] += acc;
        }
    }
}

// C[k×n] += A[m×k]ᵀ · G[m×n]
void gemm_tn(const double* a, const double* g, double* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            if (av == 0.0) continue;
            double* crow = c + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
        }
    }
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
    require_matrix("matmul", a);
    require_matrix("matmul", b);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul: inner extents disagree for " + shape_string(a.shape()) + " and " +
                             shape_string(b.shape()));
    }
    Tensor out = Tensor::zeros({m, n});
    gemm_nn(a.value().data.data(), b.value().data.data(), out.data.data(), m, k, n);

    Tape& tape = a.tape();
    const auto aid = a.id(), bid = b.id();
    return tape.record(std::move(out), {aid, bid}, [&tape, aid, bid, m, k, n](std::span<const double> g) {
        if (tape.needs_grad(aid)) {
            gemm_nt(g.data(), tape.value(bid).data.data(), tape.grad_buffer(aid).data(), m, n, k);
        }
        if (tape.needs_grad(bid)) {
            gemm_tn(tape.value(aid).data.data(), g.data(), tape.grad_buffer(bid).data(), m, k, n);
        }
    });
}

Var add(const Var& a, const Var& b) {
    require_same_shape("add", a, b);
    Tensor out = a.value();
    out.requires_grad = false;
    const auto& bv = b.value().data;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += bv[i];
    Tape& tape = a.tape();
    const auto aid = a.id(), bid = b.id();
    return tape.record(std::move(out), {aid, bid}, [&tape, aid, bid](std::span<const double> g) {
        for (auto id : {aid, bid}) {
            if (!tape.needs_grad(id)) continue;
            auto dst = tape.grad_buffer(id);
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
        }
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape("sub", a, b);
    Tensor out = a.value();
    out.requires_grad = false;
    const auto& bv = b.value().data;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= bv[i];
    Tape& tape = a.tape();
    const auto aid = a.id(), bid = b.id();
    return tape.record(std::move(out), {aid, bid}, [&tape, aid, bid](std::span<const double> g) {
        if (tape.needs_grad(aid)) {
            auto dst = tape.grad_buffer(aid);
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
        }
        if (tape.needs_grad(bid)) {
            auto dst = tape.grad_buffer(bid);
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] -= g[i];
        }
    });
}

Var mul(const Var& a, const Var& b) {
    require_same_shape("mul", a, b);
    Tensor out = a.value();
    out.requires_grad = false;
    const auto& bv = b.value().data;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= bv[i];
    Tape& tape = a.tape();
    const auto aid = a.id(), bid = b.id();
    return tape.record(std::move(out), {aid, bid}, [&tape, aid, bid](std::span<const double> g) {
        const auto& av = tape.value(aid).data;
        const auto& bv = tape.value(bid).data;
        if (tape.needs_grad(aid)) {
            auto dst = tape.grad_buffer(aid);
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * bv[i];
        }
        if (tape.needs_grad(bid)) {
            auto dst = tape.grad_buffer(bid);
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * av[i];
        }
    });
}

Var scale(const Var& x, double factor) {
    return unary(x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Var add_scalar(const Var& x, double value) {
    return unary(x, [value](double v) { return v + value; }, [](double, double) { return 1.0; });
}

Var leaky_relu(const Var& x, double slope) {
    return unary(
        x, [slope](double v) { return v > 0.0 ? v : slope * v; },
        [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Var sigmoid(const Var& x) {
    return unary(
        x,
        [](double v) {
            if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
            const double e = std::exp(v);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Var sin2pi(const Var& x) {
    return unary(
        x, [](double v) { return std::sin(kTwoPi * v); },
        [](double v, double) { return kTwoPi * std::cos(kTwoPi * v); });
}

Var cos2pi(const Var& x) {
    return unary(
        x, [](double v) { return std::cos(kTwoPi * v); },
        [](double v, double) { return -kTwoPi * std::sin(kTwoPi * v); });
}

Var exp(const Var& x) {
    return unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var add_bias(const Var& x, const Var& bias) {
    require_matrix("add_bias", x);
    const std::size_t m = x.rows(), n = x.cols();
    if (bias.value().size() != n) {
        throw DimensionError("add_bias: bias " + shape_string(bias.shape()) + " does not match input " +
                             shape_string(x.shape()));
    }
    Tensor out = x.value();
    out.requires_grad = false;
    const auto& bv = bias.value().data;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.data[i * n + j] += bv[j];
    Tape& tape = x.tape();
    const auto xid = x.id(), bid = bias.id();
    return tape.record(std::move(out), {xid, bid}, [&tape, xid, bid, m, n](std::span<const double> g) {
        if (tape.needs_grad(xid)) {
            auto dst = tape.grad_buffer(xid);
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
        }
        if (tape.needs_grad(bid)) {
            auto dst = tape.grad_buffer(bid);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) dst[j] += g[i * n + j];
        }
    });
}

Var column_affine(const Var& x, std::span<const double> shift, std::span<const double> factor) {
    require_matrix("column_affine", x);
    const std::size_t m = x.rows(), n = x.cols();
    if (shift.size() != n || factor.size() != n) {
        throw DimensionError("column_affine: expected " + std::to_string(n) + " column coefficients, got " +
                             std::to_string(shift.size()) + " and " + std::to_string(factor.size()));
    }
    Tensor out = x.value();
    out.requires_grad = false;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto& v = out.data[i * n + j];
            v = (v - shift[j]) * factor[j];
        }
    Tape& tape = x.tape();
    const auto xid = x.id();
    std::vector<double> f(factor.begin(), factor.end());
    return tape.record(std::move(out), {xid}, [&tape, xid, m, n, f = std::move(f)](std::span<const double> g) {
        auto dst = tape.grad_buffer(xid);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) dst[i * n + j] += g[i * n + j] * f[j];
    });
}

Var slice_columns(const Var& x, std::size_t begin, std::size_t end) {
    require_matrix("slice_columns", x);
    const std::size_t m = x.rows(), n = x.cols();
    if (begin > end || end > n) {
        throw DimensionError("slice_columns: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                             ") outside " + shape_string(x.shape()));
    }
    const std::size_t w = end - begin;
    Tensor out = Tensor::zeros({m, w});
    const auto& xv = x.value().data;
    for (std::size_t i = 0; i < m; ++i)
        std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>(i * n + begin), w,
                    out.data.begin() + static_cast<std::ptrdiff_t>(i * w));
    Tape& tape = x.tape();
    const auto xid = x.id();
    return tape.record(std::move(out), {xid}, [&tape, xid, m, n, w, begin](std::span<const double> g) {
        auto dst = tape.grad_buffer(xid);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) dst[i * n + begin + j] += g[i * w + j];
    });
}

Var interleave_columns(const Var& a, const Var& b) {
    require_matrix("interleave_columns", a);
    require_same_shape("interleave_columns", a, b);
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = Tensor::zeros({m, 2 * n});
    const auto& av = a.value().data;
    const auto& bv = b.value().data;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out.data[i * 2 * n + 2 * j] = av[i * n + j];
            out.data[i * 2 * n + 2 * j + 1] = bv[i * n + j];
        }
    Tape& tape = a.tape();
    const auto aid = a.id(), bid = b.id();
    return tape.record(std::move(out), {aid, bid}, [&tape, aid, bid, m, n](std::span<const double> g) {
        for (std::size_t side = 0; side < 2; ++side) {
            const auto id = side == 0 ? aid : bid;
            if (!tape.needs_grad(id)) continue;
            auto dst = tape.grad_buffer(id);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) dst[i * n + j] += g[i * 2 * n + 2 * j + side];
        }
    });
}

Var sum(const Var& x) {
    const auto& xv = x.value().data;
    if (xv.empty()) throw EmptyInputError("sum: empty tensor");
    double total = 0.0;
    for (double v : xv) total += v;
    Tape& tape = x.tape();
    const auto xid = x.id();
    return tape.record(Tensor::scalar(total), {xid}, [&tape, xid](std::span<const double> g) {
        for (auto& d : tape.grad_buffer(xid)) d += g[0];
    });
}

Var mean(const Var& x) {
    const auto n = x.value().size();
    if (n == 0) throw EmptyInputError("mean: empty tensor");
    return scale(sum(x), 1.0 / static_cast<double>(n));
}

namespace {

template <class Pick>
Var per_feature_reduce(const char* op, const Var& x, Pick pick) {
    require_matrix(op, x);
    const std::size_t m = x.rows(), n = x.cols();
    if (m == 0 || n == 0) throw EmptyInputError(std::string(op) + ": empty tensor");
    const auto& xv = x.value().data;
    std::vector<double> out(xv.begin(), xv.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 1; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j] = pick(out[j], xv[i * n + j]);
    // No backward rule: downstream consumers treat the statistics as constants.
    return x.tape().record(Tensor::vector(std::move(out)), {x.id()}, {});
}

}  // namespace

Var per_feature_min(const Var& x) {
    return per_feature_reduce("per_feature_min", x, [](double a, double b) { return std::min(a, b); });
}

Var per_feature_max(const Var& x) {
    return per_feature_reduce("per_feature_max", x, [](double a, double b) { return std::max(a, b); });
}

Var mse_loss(const Var& prediction, const Var& target) {
    require_same_shape("mse_loss", prediction, target);
    const auto d = sub(prediction, target);
    return mean(mul(d, d));
}

Var bce_loss(const Var& prediction, const Var& target) {
    require_same_shape("bce_loss", prediction, target);
    const auto& p = prediction.value().data;
    const auto& t = target.value().data;
    if (p.empty()) throw EmptyInputError("bce_loss: empty tensor");
    const double inv_n = 1.0 / static_cast<double>(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
        total -= t[i] * std::log(q) + (1.0 - t[i]) * std::log(1.0 - q);
    }
    Tape& tape = prediction.tape();
    const auto pid = prediction.id(), tid = target.id();
    return tape.record(Tensor::scalar(total * inv_n), {pid, tid}, [&tape, pid, tid, inv_n](std::span<const double> g) {
        const auto& p = tape.value(pid).data;
        const auto& t = tape.value(tid).data;
        if (tape.needs_grad(pid)) {
            auto dst = tape.grad_buffer(pid);
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p[i] < kBceClamp || p[i] > 1.0 - kBceClamp) continue;
                dst[i] += g[0] * inv_n * ((1.0 - t[i]) / (1.0 - p[i]) - t[i] / p[i]);
            }
        }
        if (tape.needs_grad(tid)) {
            auto dst = tape.grad_buffer(tid);
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double q = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
                dst[i] -= g[0] * inv_n * (std::log(q) - std::log(1.0 - q));
            }
        }
    });
}

Var reconstruction_loss(LossKind kind, const Var& prediction, const Var& target) {
    return kind == LossKind::bce ? bce_loss(prediction, target) : mse_loss(prediction, target);
}

}  // namespace daelab::ops
