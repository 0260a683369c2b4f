// SPDX-License-Identifier: Apache-2.0
#include "scriv/ops.hpp"

#include <algorithm>
#include <cmath>

namespace scriv {

template <typename S>
void check_finite(const Tensor<S>& t, const char* op) {
    for (S v : t.values())
        if (!std::isfinite(static_cast<double>(v)))
            throw NumericError(std::string("op '") + op + "': non-finite value in output" +
                               (t.name().empty() ? "" : " '" + t.name() + "'"));
}

namespace {

template <typename S>
void finish(const char* op, std::vector<Tensor<S>> inputs, Tensor<S>& out,
            std::function<void()> backward) {
    check_finite(out, op);
    bool any = false;
    for (const auto& t : inputs) any = any || t.requires_grad();
    out.set_requires_grad(any);
    if (any && Tape<S>::active() && backward)
        Tape<S>::active()->record(op, std::move(inputs), std::move(backward));
}

template <typename S>
void require_same_shape(const char* op, Tensor<S> a, Tensor<S> b) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
}

}  // namespace

// ---- elementwise ----

template <typename S>
Tensor<S> add(Tensor<S> a, Tensor<S> b) {
    require_same_shape("add", a, b);
    auto out = Tensor<S>::zeros(a.shape());
    out.vec() = a.vec() + b.vec();
    finish<S>("add", {a, b}, out, [a, b, out]() mutable {
        if (a.requires_grad()) a.grad_vec() += out.grad_vec();
        if (b.requires_grad()) b.grad_vec() += out.grad_vec();
    });
    return out;
}

template <typename S>
Tensor<S> sub(Tensor<S> a, Tensor<S> b) {
    require_same_shape("sub", a, b);
    auto out = Tensor<S>::zeros(a.shape());
    out.vec() = a.vec() - b.vec();
    finish<S>("sub", {a, b}, out, [a, b, out]() mutable {
        if (a.requires_grad()) a.grad_vec() += out.grad_vec();
        if (b.requires_grad()) b.grad_vec() -= out.grad_vec();
    });
    return out;
}

template <typename S>
Tensor<S> mul(Tensor<S> a, Tensor<S> b) {
    require_same_shape("mul", a, b);
    auto out = Tensor<S>::zeros(a.shape());
    out.vec() = a.vec().cwiseProduct(b.vec());
    finish<S>("mul", {a, b}, out, [a, b, out]() mutable {
        if (a.requires_grad()) a.grad_vec() += out.grad_vec().cwiseProduct(b.vec());
        if (b.requires_grad()) b.grad_vec() += out.grad_vec().cwiseProduct(a.vec());
    });
    return out;
}

template <typename S>
Tensor<S> scale(Tensor<S> a, S k) {
    auto out = Tensor<S>::zeros(a.shape());
    out.vec() = a.vec() * k;
    finish<S>("scale", {a}, out, [a, out, k]() mutable {
        if (a.requires_grad()) a.grad_vec() += out.grad_vec() * k;
    });
    return out;
}

template <typename S>
Tensor<S> relu(Tensor<S> a) {
    auto out = Tensor<S>::zeros(a.shape());
    out.vec() = a.vec().cwiseMax(S(0));
    finish<S>("relu", {a}, out, [a, out]() mutable {
        if (!a.requires_grad()) return;
        auto g = a.grad_vec();
        const auto& x = a.values();
        const auto& og = out.grad();
        for (int64_t i = 0; i < a.numel(); ++i)
            if (x[static_cast<size_t>(i)] > S(0)) g[i] += og[static_cast<size_t>(i)];
    });
    return out;
}

template <typename S>
Tensor<S> gelu(Tensor<S> a) {
    auto out = Tensor<S>::zeros(a.shape());
    const double inv_sqrt2 = 0.7071067811865475244;
    for (int64_t i = 0; i < a.numel(); ++i) {
        const double x = static_cast<double>(a.data()[i]);
        out.data()[i] = static_cast<S>(0.5 * x * (1.0 + std::erf(x * inv_sqrt2)));
    }
    finish<S>("gelu", {a}, out, [a, out, inv_sqrt2]() mutable {
        if (!a.requires_grad()) return;
        auto g = a.grad();
        const auto& og = out.grad();
        const double inv_sqrt2pi = 0.3989422804014326779;
        for (size_t i = 0; i < g.size(); ++i) {
            const double x = static_cast<double>(a.values()[i]);
            const double d = 0.5 * (1.0 + std::erf(x * inv_sqrt2)) + x * inv_sqrt2pi * std::exp(-0.5 * x * x);
            a.grad()[i] += static_cast<S>(d * static_cast<double>(og[i]));
        }
    });
    return out;
}

template <typename S>
Tensor<S> dropout(Tensor<S> a, double p, Rng& rng, bool training) {
    if (p < 0.0 || p >= 1.0)
        throw DomainError("dropout: rate " + std::to_string(p) + " outside [0, 1)");
    if (!training || p == 0.0) {
        auto out = Tensor<S>::zeros(a.shape());
        out.vec() = a.vec();
        finish<S>("dropout", {a}, out, [a, out]() mutable {
            if (a.requires_grad()) a.grad_vec() += out.grad_vec();
        });
        return out;
    }
    const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
    std::vector<S> mask(static_cast<size_t>(a.numel()));
    for (auto& m : mask) m = rng.bernoulli(p) ? S(0) : keep_scale;
    auto out = Tensor<S>::zeros(a.shape());
    for (size_t i = 0; i < mask.size(); ++i) out.data()[i] = a.data()[i] * mask[i];
    finish<S>("dropout", {a}, out, [a, out, mask = std::move(mask)]() mutable {
        if (!a.requires_grad()) return;
        for (size_t i = 0; i < mask.size(); ++i) a.grad()[i] += out.grad()[i] * mask[i];
    });
    return out;
}

template <typename S>
Tensor<S> reshape(Tensor<S> a, Shape new_shape) {
    if (shape_numel(new_shape) != a.numel())
        throw DimensionError("reshape: " + shape_str(a.shape()) + " to " + shape_str(new_shape));
    auto out = Tensor<S>::from(std::move(new_shape), a.values());
    finish<S>("reshape", {a}, out, [a, out]() mutable {
        if (a.requires_grad()) a.grad_vec() += out.grad_vec();
    });
    return out;
}

template <typename S>
Tensor<S> flatten(Tensor<S> a) {
    return reshape(a, Shape{a.numel()});
}

template <typename S>
Tensor<S> concat(Tensor<S> a, Tensor<S> b, int axis) {
    if (a.rank() != b.rank()) throw DimensionError("concat: rank mismatch");
    if (axis < 0 || axis >= a.rank()) throw DimensionError("concat: axis out of range");
    for (int i = 0; i < a.rank(); ++i)
        if (i != axis && a.dim(i) != b.dim(i))
            throw DimensionError("concat: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) +
                                 " differ on axis " + std::to_string(i));
    Shape out_shape = a.shape();
    out_shape[static_cast<size_t>(axis)] += b.dim(axis);
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= a.dim(i);
    for (int i = axis + 1; i < a.rank(); ++i) inner *= a.dim(i);
    const int64_t wa = a.dim(axis) * inner, wb = b.dim(axis) * inner;
    auto out = Tensor<S>::zeros(out_shape);
    for (int64_t o = 0; o < outer; ++o) {
        std::copy_n(a.data() + o * wa, wa, out.data() + o * (wa + wb));
        std::copy_n(b.data() + o * wb, wb, out.data() + o * (wa + wb) + wa);
    }
    finish<S>("concat", {a, b}, out, [a, b, out, outer, wa, wb]() mutable {
        for (int64_t o = 0; o < outer; ++o) {
            const S* og = out.grad().data() + o * (wa + wb);
            if (a.requires_grad())
                for (int64_t i = 0; i < wa; ++i) a.grad()[static_cast<size_t>(o * wa + i)] += og[i];
            if (b.requires_grad())
                for (int64_t i = 0; i < wb; ++i) b.grad()[static_cast<size_t>(o * wb + i)] += og[wa + i];
        }
    });
    return out;
}

template <typename S>
Tensor<S> slice(Tensor<S> a, int axis, int64_t start, int64_t len) {
    if (axis < 0 || axis >= a.rank()) throw DimensionError("slice: axis out of range");
    if (start < 0 || len <= 0 || start + len > a.dim(axis))
        throw DimensionError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + len) +
                             ") on axis extent " + std::to_string(a.dim(axis)));
    Shape out_shape = a.shape();
    out_shape[static_cast<size_t>(axis)] = len;
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= a.dim(i);
    for (int i = axis + 1; i < a.rank(); ++i) inner *= a.dim(i);
    const int64_t wa = a.dim(axis) * inner, wo = len * inner;
    auto out = Tensor<S>::zeros(out_shape);
    for (int64_t o = 0; o < outer; ++o)
        std::copy_n(a.data() + o * wa + start * inner, wo, out.data() + o * wo);
    finish<S>("slice", {a}, out, [a, out, outer, wa, wo, start, inner]() mutable {
        if (!a.requires_grad()) return;
        for (int64_t o = 0; o < outer; ++o)
            for (int64_t i = 0; i < wo; ++i)
                a.grad()[static_cast<size_t>(o * wa + start * inner + i)] += out.grad()[static_cast<size_t>(o * wo + i)];
    });
    return out;
}

template <typename S>
Tensor<S> transpose2d(Tensor<S> a) {
    if (a.rank() != 2) throw DimensionError("transpose2d: rank " + std::to_string(a.rank()));
    const int64_t r = a.dim(0), c = a.dim(1);
    auto out = Tensor<S>::zeros({c, r});
    out.mat(c, r) = a.mat(r, c).transpose();
    finish<S>("transpose2d", {a}, out, [a, out, r, c]() mutable {
        if (a.requires_grad()) a.grad_mat(r, c) += out.grad_mat(c, r).transpose();
    });
    return out;
}

template <typename S>
Tensor<S> sum(Tensor<S> a) {
    auto out = Tensor<S>::scalar(a.vec().sum());
    finish<S>("sum", {a}, out, [a, out]() mutable {
        if (a.requires_grad()) a.grad_vec().array() += out.grad()[0];
    });
    return out;
}

template <typename S>
Tensor<S> mean(Tensor<S> a) {
    const S inv = static_cast<S>(1.0 / static_cast<double>(a.numel()));
    auto out = Tensor<S>::scalar(a.vec().sum() * inv);
    finish<S>("mean", {a}, out, [a, out, inv]() mutable {
        if (a.requires_grad()) a.grad_vec().array() += out.grad()[0] * inv;
    });
    return out;
}

// ---- linear algebra ----

template <typename S>
Tensor<S> matmul(Tensor<S> a, Tensor<S> b, bool trans_a, bool trans_b) {
    if (a.rank() != 2 || b.rank() != 2) throw DimensionError("matmul: both operands must be rank 2");
    const int64_t m = trans_a ? a.dim(1) : a.dim(0);
    const int64_t ka = trans_a ? a.dim(0) : a.dim(1);
    const int64_t kb = trans_b ? b.dim(1) : b.dim(0);
    const int64_t n = trans_b ? b.dim(0) : b.dim(1);
    if (ka != kb)
        throw DimensionError("matmul: inner extents " + std::to_string(ka) + " vs " + std::to_string(kb));
    auto out = Tensor<S>::zeros({m, n});
    auto A = a.mat(a.dim(0), a.dim(1));
    auto B = b.mat(b.dim(0), b.dim(1));
    auto C = out.mat(m, n);
    if (!trans_a && !trans_b) C.noalias() = A * B;
    else if (trans_a && !trans_b) C.noalias() = A.transpose() * B;
    else if (!trans_a && trans_b) C.noalias() = A * B.transpose();
    else C.noalias() = A.transpose() * B.transpose();
    finish<S>("matmul", {a, b}, out, [a, b, out, m, n, trans_a, trans_b]() mutable {
        auto A = a.mat(a.dim(0), a.dim(1));
        auto B = b.mat(b.dim(0), b.dim(1));
        auto G = out.grad_mat(m, n);
        if (a.requires_grad()) {
            auto dA = a.grad_mat(a.dim(0), a.dim(1));
            if (!trans_a && !trans_b) dA.noalias() += G * B.transpose();
            else if (!trans_a && trans_b) dA.noalias() += G * B;
            else if (trans_a && !trans_b) dA.noalias() += B * G.transpose();
            else dA.noalias() += B.transpose() * G.transpose();
        }
        if (b.requires_grad()) {
            auto dB = b.grad_mat(b.dim(0), b.dim(1));
            if (!trans_a && !trans_b) dB.noalias() += A.transpose() * G;
            else if (trans_a && !trans_b) dB.noalias() += A * G;
            else if (!trans_a && trans_b) dB.noalias() += G.transpose() * A;
            else dB.noalias() += G.transpose() * A.transpose();
        }
    });
    return out;
}

template <typename S>
Tensor<S> linear(Tensor<S> x, Tensor<S> w, Tensor<S> b) {
    if (x.rank() != 2 || w.rank() != 2) throw DimensionError("linear: x and w must be rank 2");
    if (x.dim(1) != w.dim(0))
        throw DimensionError("linear: x cols " + std::to_string(x.dim(1)) + " vs w rows " +
                             std::to_string(w.dim(0)));
    const int64_t n = x.dim(0), din = x.dim(1), dout = w.dim(1);
    if (b.defined() && b.numel() != dout) throw DimensionError("linear: bias extent mismatch");
    auto out = Tensor<S>::zeros({n, dout});
    out.mat(n, dout).noalias() = x.mat(n, din) * w.mat(din, dout);
    if (b.defined()) out.mat(n, dout).rowwise() += b.vec().transpose();
    std::vector<Tensor<S>> ins{x, w};
    if (b.defined()) ins.push_back(b);
    finish<S>("linear", ins, out, [x, w, b, out, n, din, dout]() mutable {
        auto G = out.grad_mat(n, dout);
        if (x.requires_grad()) x.grad_mat(n, din).noalias() += G * w.mat(din, dout).transpose();
        if (w.requires_grad()) w.grad_mat(din, dout).noalias() += x.mat(n, din).transpose() * G;
        if (b.defined() && b.requires_grad()) b.grad_vec() += G.colwise().sum().transpose();
    });
    return out;
}

template <typename S>
Tensor<S> embedding_lookup(Tensor<S> table, const std::vector<int>& ids) {
    if (table.rank() != 2) throw DimensionError("embedding_lookup: table must be rank 2");
    const int64_t v = table.dim(0), d = table.dim(1);
    if (ids.empty()) throw DomainError("embedding_lookup: empty id sequence");
    for (int id : ids)
        if (id < 0 || id >= v)
            throw DomainError("embedding_lookup: id " + std::to_string(id) + " outside vocabulary of " +
                              std::to_string(v));
    auto out = Tensor<S>::zeros({static_cast<int64_t>(ids.size()), d});
    for (size_t i = 0; i < ids.size(); ++i)
        std::copy_n(table.data() + static_cast<int64_t>(ids[i]) * d, d, out.data() + static_cast<int64_t>(i) * d);
    finish<S>("embedding_lookup", {table}, out, [table, out, ids, d]() mutable {
        if (!table.requires_grad()) return;
        table.ensure_grad();
        for (size_t i = 0; i < ids.size(); ++i) {
            S* dst = table.grad().data() + static_cast<int64_t>(ids[i]) * d;
            const S* src = out.grad().data() + static_cast<int64_t>(i) * d;
            for (int64_t j = 0; j < d; ++j) dst[j] += src[j];
        }
    });
    return out;
}

// ---- softmax family ----

namespace {
template <typename S>
std::pair<int64_t, int64_t> rows_cols_last_axis(Tensor<S> a, const char* op) {
    if (a.rank() < 1) throw DimensionError(std::string(op) + ": rank 0");
    const int64_t cols = a.shape().back();
    return {a.numel() / cols, cols};
}
}  // namespace

template <typename S>
Tensor<S> softmax(Tensor<S> a) {
    auto [rows, cols] = rows_cols_last_axis(a, "softmax");
    auto out = Tensor<S>::zeros(a.shape());
    for (int64_t r = 0; r < rows; ++r) {
        const S* x = a.data() + r * cols;
        S* y = out.data() + r * cols;
        S mx = x[0];
        for (int64_t j = 1; j < cols; ++j) mx = std::max(mx, x[j]);
        double z = 0;
        for (int64_t j = 0; j < cols; ++j) {
            const double e = std::exp(static_cast<double>(x[j] - mx));
            y[j] = static_cast<S>(e);
            z += e;
        }
        const double inv = 1.0 / z;
        for (int64_t j = 0; j < cols; ++j) y[j] = static_cast<S>(static_cast<double>(y[j]) * inv);
    }
    finish<S>("softmax", {a}, out, [a, out, rows = rows, cols = cols]() mutable {
        if (!a.requires_grad()) return;
        for (int64_t r = 0; r < rows; ++r) {
            const S* y = out.data() + r * cols;
            const S* gy = out.grad().data() + r * cols;
            S* gx = a.grad().data() + r * cols;
            double dot = 0;
            for (int64_t j = 0; j < cols; ++j) dot += static_cast<double>(gy[j]) * static_cast<double>(y[j]);
            for (int64_t j = 0; j < cols; ++j)
                gx[j] += static_cast<S>(static_cast<double>(y[j]) * (static_cast<double>(gy[j]) - dot));
        }
    });
    return out;
}

template <typename S>
Tensor<S> log_softmax(Tensor<S> a) {
    auto [rows, cols] = rows_cols_last_axis(a, "log_softmax");
    auto out = Tensor<S>::zeros(a.shape());
    for (int64_t r = 0; r < rows; ++r) {
        const S* x = a.data() + r * cols;
        S* y = out.data() + r * cols;
        S mx = x[0];
        for (int64_t j = 1; j < cols; ++j) mx = std::max(mx, x[j]);
        double z = 0;
        for (int64_t j = 0; j < cols; ++j) z += std::exp(static_cast<double>(x[j] - mx));
        const double lse = static_cast<double>(mx) + std::log(z);
        for (int64_t j = 0; j < cols; ++j) y[j] = static_cast<S>(static_cast<double>(x[j]) - lse);
    }
    finish<S>("log_softmax", {a}, out, [a, out, rows = rows, cols = cols]() mutable {
        if (!a.requires_grad()) return;
        for (int64_t r = 0; r < rows; ++r) {
            const S* y = out.data() + r * cols;
            const S* gy = out.grad().data() + r * cols;
            S* gx = a.grad().data() + r * cols;
            double gsum = 0;
            for (int64_t j = 0; j < cols; ++j) gsum += static_cast<double>(gy[j]);
            for (int64_t j = 0; j < cols; ++j)
                gx[j] += static_cast<S>(static_cast<double>(gy[j]) -
                                        std::exp(static_cast<double>(y[j])) * gsum);
        }
    });
    return out;
}

// ---- normalization ----

template <typename S>
Tensor<S> layer_norm(Tensor<S> x, Tensor<S> gamma, Tensor<S> beta, double eps) {
    auto [rows, cols] = rows_cols_last_axis(x, "layer_norm");
    if (gamma.numel() != cols || beta.numel() != cols)
        throw DimensionError("layer_norm: gamma/beta extent " + std::to_string(gamma.numel()) + "/" +
                             std::to_string(beta.numel()) + " vs features " + std::to_string(cols));
    auto out = Tensor<S>::zeros(x.shape());
    std::vector<S> xhat(static_cast<size_t>(x.numel()));
    std::vector<S> inv_std(static_cast<size_t>(rows));
    for (int64_t r = 0; r < rows; ++r) {
        const S* xr = x.data() + r * cols;
        double mu = 0;
        for (int64_t j = 0; j < cols; ++j) mu += xr[j];
        mu /= static_cast<double>(cols);
        double var = 0;
        for (int64_t j = 0; j < cols; ++j) {
            const double d = static_cast<double>(xr[j]) - mu;
            var += d * d;
        }
        var /= static_cast<double>(cols);
        const double istd = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(r)] = static_cast<S>(istd);
        for (int64_t j = 0; j < cols; ++j) {
            const S h = static_cast<S>((static_cast<double>(xr[j]) - mu) * istd);
            xhat[static_cast<size_t>(r * cols + j)] = h;
            out.data()[r * cols + j] = gamma.data()[j] * h + beta.data()[j];
        }
    }
    finish<S>("layer_norm", {x, gamma, beta}, out,
              [x, gamma, beta, out, rows = rows, cols = cols, xhat = std::move(xhat),
               inv_std = std::move(inv_std)]() mutable {
                  for (int64_t r = 0; r < rows; ++r) {
                      const S* gy = out.grad().data() + r * cols;
                      const S* h = xhat.data() + r * cols;
                      if (gamma.requires_grad() || beta.requires_grad()) {
                          gamma.ensure_grad();
                          beta.ensure_grad();
                          for (int64_t j = 0; j < cols; ++j) {
                              if (gamma.requires_grad()) gamma.grad()[static_cast<size_t>(j)] += gy[j] * h[j];
                              if (beta.requires_grad()) beta.grad()[static_cast<size_t>(j)] += gy[j];
                          }
                      }
                      if (!x.requires_grad()) continue;
                      double m1 = 0, m2 = 0;
                      for (int64_t j = 0; j < cols; ++j) {
                          const double gg = static_cast<double>(gy[j]) * static_cast<double>(gamma.data()[j]);
                          m1 += gg;
                          m2 += gg * static_cast<double>(h[j]);
                      }
                      m1 /= static_cast<double>(cols);
                      m2 /= static_cast<double>(cols);
                      S* gx = x.grad().data() + r * cols;
                      const double istd = static_cast<double>(inv_std[static_cast<size_t>(r)]);
                      for (int64_t j = 0; j < cols; ++j) {
                          const double gg = static_cast<double>(gy[j]) * static_cast<double>(gamma.data()[j]);
                          gx[j] += static_cast<S>((gg - m1 - static_cast<double>(h[j]) * m2) * istd);
                      }
                  }
              });
    return out;
}

template <typename S>
Tensor<S> instance_norm(Tensor<S> x, Tensor<S> gamma, Tensor<S> beta, double eps) {
    if (x.rank() != 4) throw DimensionError("instance_norm: expected NCHW, got " + shape_str(x.shape()));
    const int64_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    if (gamma.numel() != c || beta.numel() != c)
        throw DimensionError("instance_norm: gamma/beta extent vs channels " + std::to_string(c));
    auto out = Tensor<S>::zeros(x.shape());
    std::vector<S> xhat(static_cast<size_t>(x.numel()));
    std::vector<S> inv_std(static_cast<size_t>(n * c));
    for (int64_t g = 0; g < n * c; ++g) {
        const S* xs = x.data() + g * hw;
        double mu = 0;
        for (int64_t j = 0; j < hw; ++j) mu += xs[j];
        mu /= static_cast<double>(hw);
        double var = 0;
        for (int64_t j = 0; j < hw; ++j) {
            const double d = static_cast<double>(xs[j]) - mu;
            var += d * d;
        }
        var /= static_cast<double>(hw);
        const double istd = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(g)] = static_cast<S>(istd);
        const S gc = gamma.data()[g % c], bc = beta.data()[g % c];
        for (int64_t j = 0; j < hw; ++j) {
            const S h = static_cast<S>((static_cast<double>(xs[j]) - mu) * istd);
            xhat[static_cast<size_t>(g * hw + j)] = h;
            out.data()[g * hw + j] = gc * h + bc;
        }
    }
    finish<S>("instance_norm", {x, gamma, beta}, out,
              [x, gamma, beta, out, n, c, hw, xhat = std::move(xhat), inv_std = std::move(inv_std)]() mutable {
                  for (int64_t g = 0; g < n * c; ++g) {
                      const S* gy = out.grad().data() + g * hw;
                      const S* h = xhat.data() + g * hw;
                      const int64_t ch = g % c;
                      if (gamma.requires_grad() || beta.requires_grad()) {
                          gamma.ensure_grad();
                          beta.ensure_grad();
                          double dg = 0, db = 0;
                          for (int64_t j = 0; j < hw; ++j) {
                              dg += static_cast<double>(gy[j]) * static_cast<double>(h[j]);
                              db += static_cast<double>(gy[j]);
                          }
                          if (gamma.requires_grad()) gamma.grad()[static_cast<size_t>(ch)] += static_cast<S>(dg);
                          if (beta.requires_grad()) beta.grad()[static_cast<size_t>(ch)] += static_cast<S>(db);
                      }
                      if (!x.requires_grad()) continue;
                      const double gc = static_cast<double>(gamma.data()[ch]);
                      double m1 = 0, m2 = 0;
                      for (int64_t j = 0; j < hw; ++j) {
                          const double gg = static_cast<double>(gy[j]) * gc;
                          m1 += gg;
                          m2 += gg * static_cast<double>(h[j]);
                      }
                      m1 /= static_cast<double>(hw);
                      m2 /= static_cast<double>(hw);
                      S* gx = x.grad().data() + g * hw;
                      const double istd = static_cast<double>(inv_std[static_cast<size_t>(g)]);
                      for (int64_t j = 0; j < hw; ++j) {
                          const double gg = static_cast<double>(gy[j]) * gc;
                          gx[j] += static_cast<S>((gg - m1 - static_cast<double>(h[j]) * m2) * istd);
                      }
                  }
              });
    return out;
}

// ---- cross entropy ----

template <typename S>
Tensor<S> cross_entropy(Tensor<S> logits, const std::vector<int>& target_ids, int ignore_id) {
    if (logits.rank() != 2) throw DimensionError("cross_entropy: logits must be rank 2");
    const int64_t n = logits.dim(0), v = logits.dim(1);
    if (static_cast<int64_t>(target_ids.size()) != n)
        throw DimensionError("cross_entropy: " + std::to_string(target_ids.size()) + " targets for " +
                             std::to_string(n) + " rows");
    if (ignore_id < 0 || ignore_id >= v)
        throw DomainError("cross_entropy: ignore_id " + std::to_string(ignore_id) +
                          " outside vocabulary of " + std::to_string(v));
    for (int t : target_ids)
        if (t < 0 || t >= v)
            throw DomainError("cross_entropy: target id " + std::to_string(t) + " outside vocabulary of " +
                              std::to_string(v));
    // Row-wise log-sum-exp; saved softmax feeds the backward pass.
    std::vector<S> prob(static_cast<size_t>(logits.numel()));
    double total = 0;
    int64_t count = 0;
    for (int64_t r = 0; r < n; ++r) {
        const S* x = logits.data() + r * v;
        S mx = x[0];
        for (int64_t j = 1; j < v; ++j) mx = std::max(mx, x[j]);
        double z = 0;
        for (int64_t j = 0; j < v; ++j) z += std::exp(static_cast<double>(x[j] - mx));
        const double lse = static_cast<double>(mx) + std::log(z);
        for (int64_t j = 0; j < v; ++j)
            prob[static_cast<size_t>(r * v + j)] = static_cast<S>(std::exp(static_cast<double>(x[j]) - lse));
        if (target_ids[static_cast<size_t>(r)] == ignore_id) continue;
        total += lse - static_cast<double>(x[target_ids[static_cast<size_t>(r)]]);
        ++count;
    }
    auto out = Tensor<S>::scalar(count ? static_cast<S>(total / static_cast<double>(count)) : S(0));
    finish<S>("cross_entropy", {logits}, out,
              [logits, out, target_ids, ignore_id, n, v, count, prob = std::move(prob)]() mutable {
                  if (!logits.requires_grad() || count == 0) return;
                  const S g = out.grad()[0] / static_cast<S>(count);
                  for (int64_t r = 0; r < n; ++r) {
                      const int t = target_ids[static_cast<size_t>(r)];
                      if (t == ignore_id) continue;
                      S* gx = logits.grad().data() + r * v;
                      const S* p = prob.data() + r * v;
                      for (int64_t j = 0; j < v; ++j) gx[j] += g * p[j];
                      gx[t] -= g;
                  }
              });
    return out;
}

// ---- explicit instantiations ----

#define SCRIV_INSTANTIATE_OPS(S)                                                                              \
    template void check_finite<S>(const Tensor<S>&, const char*);                                             \
    template Tensor<S> add<S>(Tensor<S>, Tensor<S>);                                            \
    template Tensor<S> sub<S>(Tensor<S>, Tensor<S>);                                            \
    template Tensor<S> mul<S>(Tensor<S>, Tensor<S>);                                            \
    template Tensor<S> scale<S>(Tensor<S>, S);                                                         \
    template Tensor<S> relu<S>(Tensor<S>);                                                             \
    template Tensor<S> gelu<S>(Tensor<S>);                                                             \
    template Tensor<S> dropout<S>(Tensor<S>, double, Rng&, bool);                                      \
    template Tensor<S> reshape<S>(Tensor<S>, Shape);                                                   \
    template Tensor<S> flatten<S>(Tensor<S>);                                                          \
    template Tensor<S> concat<S>(Tensor<S>, Tensor<S>, int);                                    \
    template Tensor<S> slice<S>(Tensor<S>, int, int64_t, int64_t);                                     \
    template Tensor<S> transpose2d<S>(Tensor<S>);                                                      \
    template Tensor<S> sum<S>(Tensor<S>);                                                              \
    template Tensor<S> mean<S>(Tensor<S>);                                                             \
    template Tensor<S> matmul<S>(Tensor<S>, Tensor<S>, bool, bool);                             \
    template Tensor<S> linear<S>(Tensor<S>, Tensor<S>, Tensor<S>);                       \
    template Tensor<S> embedding_lookup<S>(Tensor<S>, const std::vector<int>&);                        \
    template Tensor<S> softmax<S>(Tensor<S>);                                                          \
    template Tensor<S> log_softmax<S>(Tensor<S>);                                                      \
    template Tensor<S> layer_norm<S>(Tensor<S>, Tensor<S>, Tensor<S>, double);           \
    template Tensor<S> instance_norm<S>(Tensor<S>, Tensor<S>, Tensor<S>, double);        \
    template Tensor<S> cross_entropy<S>(Tensor<S>, const std::vector<int>&, int);

SCRIV_INSTANTIATE_OPS(float)
SCRIV_INSTANTIATE_OPS(double)

}  // namespace scriv
