// SPDX-License-Identifier: Apache-2.0
//
// Convolutions via im2col + Eigen GEMM; depthwise kernels use direct loops
// since they run on small late-stage feature maps.
#include <algorithm>
#include <cmath>

#include "scriv/ops.hpp"

namespace scriv {

int64_t conv_out_extent(int64_t in, int kernel, int stride, Padding padding) {
    if (padding == Padding::same) return (in + stride - 1) / stride;
    const int64_t span = in - kernel;
    if (span < 0) throw DimensionError("conv: kernel " + std::to_string(kernel) + " exceeds input extent " +
                                       std::to_string(in) + " under valid padding");
    return span / stride + 1;
}

namespace {

struct ConvGeom {
    int64_t n, ci, h, w;
    int64_t co, kh, kw;
    int sh, sw;
    int64_t oh, ow;
    int64_t pad_top, pad_left;
};

template <typename S>
ConvGeom conv_geometry(Tensor<S> x, Tensor<S> k, Stride stride, Padding padding,
                       bool depthwise) {
    if (x.rank() != 4) throw DimensionError("conv2d: input must be NCHW, got " + shape_str(x.shape()));
    if (k.rank() != 4) throw DimensionError("conv2d: kernel must be rank 4, got " + shape_str(k.shape()));
    if (stride.h != 1 && stride.h != 2)
        throw ContractError("conv2d: vertical stride " + std::to_string(stride.h) + " not in {1, 2}");
    if (stride.w != 1 && stride.w != 2)
        throw ContractError("conv2d: horizontal stride " + std::to_string(stride.w) + " not in {1, 2}");
    ConvGeom g;
    g.n = x.dim(0);
    g.ci = x.dim(1);
    g.h = x.dim(2);
    g.w = x.dim(3);
    g.kh = k.dim(2);
    g.kw = k.dim(3);
    g.sh = stride.h;
    g.sw = stride.w;
    if (depthwise) {
        if (k.dim(1) != 1)
            throw DimensionError("depthwise_conv2d: kernel second axis must be 1, got " +
                                 shape_str(k.shape()));
        if (k.dim(0) != g.ci)
            throw DimensionError("depthwise_conv2d: one filter per input channel required, " +
                                 std::to_string(k.dim(0)) + " filters for " + std::to_string(g.ci) +
                                 " channels");
        g.co = g.ci;
    } else {
        if (k.dim(1) != g.ci)
            throw DimensionError("conv2d: kernel input channels " + std::to_string(k.dim(1)) +
                                 " vs input channels " + std::to_string(g.ci) + " (axis 1)");
        g.co = k.dim(0);
    }
    g.oh = conv_out_extent(g.h, static_cast<int>(g.kh), g.sh, padding);
    g.ow = conv_out_extent(g.w, static_cast<int>(g.kw), g.sw, padding);
    if (padding == Padding::same) {
        const int64_t ph = std::max<int64_t>(0, (g.oh - 1) * g.sh + g.kh - g.h);
        const int64_t pw = std::max<int64_t>(0, (g.ow - 1) * g.sw + g.kw - g.w);
        g.pad_top = ph / 2;
        g.pad_left = pw / 2;
    } else {
        g.pad_top = g.pad_left = 0;
    }
    return g;
}

// col is (n*oh*ow) x (ci*kh*kw), row-major, zero where the window leaves the input.
template <typename S>
RowMat<S> im2col(Tensor<S> x, const ConvGeom& g) {
    RowMat<S> col(g.n * g.oh * g.ow, g.ci * g.kh * g.kw);
    col.setZero();
    const S* xd = x.data();
    for (int64_t n = 0; n < g.n; ++n)
        for (int64_t oy = 0; oy < g.oh; ++oy)
            for (int64_t ox = 0; ox < g.ow; ++ox) {
                S* row = col.data() + ((n * g.oh + oy) * g.ow + ox) * col.cols();
                for (int64_t c = 0; c < g.ci; ++c) {
                    const S* plane = xd + (n * g.ci + c) * g.h * g.w;
                    for (int64_t ky = 0; ky < g.kh; ++ky) {
                        const int64_t iy = oy * g.sh + ky - g.pad_top;
                        if (iy < 0 || iy >= g.h) continue;
                        for (int64_t kx = 0; kx < g.kw; ++kx) {
                            const int64_t ix = ox * g.sw + kx - g.pad_left;
                            if (ix < 0 || ix >= g.w) continue;
                            row[(c * g.kh + ky) * g.kw + kx] = plane[iy * g.w + ix];
                        }
                    }
                }
            }
    return col;
}

template <typename S>
void col2im_accumulate(const RowMat<S>& dcol, const ConvGeom& g, S* dx) {
    for (int64_t n = 0; n < g.n; ++n)
        for (int64_t oy = 0; oy < g.oh; ++oy)
            for (int64_t ox = 0; ox < g.ow; ++ox) {
                const S* row = dcol.data() + ((n * g.oh + oy) * g.ow + ox) * dcol.cols();
                for (int64_t c = 0; c < g.ci; ++c) {
                    S* plane = dx + (n * g.ci + c) * g.h * g.w;
                    for (int64_t ky = 0; ky < g.kh; ++ky) {
                        const int64_t iy = oy * g.sh + ky - g.pad_top;
                        if (iy < 0 || iy >= g.h) continue;
                        for (int64_t kx = 0; kx < g.kw; ++kx) {
                            const int64_t ix = ox * g.sw + kx - g.pad_left;
                            if (ix < 0 || ix >= g.w) continue;
                            plane[iy * g.w + ix] += row[(c * g.kh + ky) * g.kw + kx];
                        }
                    }
                }
            }
}

template <typename S>
void finish_conv(const char* op, std::vector<Tensor<S>> inputs, Tensor<S>& out,
                 std::function<void()> backward) {
    check_finite(out, op);
    bool any = false;
    for (const auto& t : inputs) any = any || t.requires_grad();
    out.set_requires_grad(any);
    if (any && Tape<S>::active()) Tape<S>::active()->record(op, std::move(inputs), std::move(backward));
}

}  // namespace

template <typename S>
Tensor<S> conv2d(Tensor<S> x, Tensor<S> k, Stride stride, Padding padding) {
    const ConvGeom g = conv_geometry(x, k, stride, padding, false);
    auto out = Tensor<S>::zeros({g.n, g.co, g.oh, g.ow});
    const RowMat<S> col = im2col(x, g);
    auto kmat = k.mat(g.co, g.ci * g.kh * g.kw);
    RowMat<S> om = col * kmat.transpose();  // (n*oh*ow) x co
    const int64_t spatial = g.oh * g.ow;
    for (int64_t n = 0; n < g.n; ++n)
        for (int64_t c = 0; c < g.co; ++c)
            for (int64_t s = 0; s < spatial; ++s)
                out.data()[(n * g.co + c) * spatial + s] = om(n * spatial + s, c);
    finish_conv<S>("conv2d", {x, k}, out, [x, k, out, g]() mutable {
        const int64_t spatial = g.oh * g.ow;
        RowMat<S> dom(g.n * spatial, g.co);
        for (int64_t n = 0; n < g.n; ++n)
            for (int64_t c = 0; c < g.co; ++c)
                for (int64_t s = 0; s < spatial; ++s)
                    dom(n * spatial + s, c) = out.grad()[static_cast<size_t>((n * g.co + c) * spatial + s)];
        auto kmat = k.mat(g.co, g.ci * g.kh * g.kw);
        if (k.requires_grad()) {
            const RowMat<S> col = im2col(x, g);  // recomputed, not saved
            k.grad_mat(g.co, g.ci * g.kh * g.kw).noalias() += dom.transpose() * col;
        }
        if (x.requires_grad()) {
            RowMat<S> dcol = dom * kmat;
            x.ensure_grad();
            col2im_accumulate(dcol, g, x.grad().data());
        }
    });
    return out;
}

template <typename S>
Tensor<S> depthwise_conv2d(Tensor<S> x, Tensor<S> k, Stride stride, Padding padding) {
    const ConvGeom g = conv_geometry(x, k, stride, padding, true);
    auto out = Tensor<S>::zeros({g.n, g.ci, g.oh, g.ow});
    for (int64_t n = 0; n < g.n; ++n)
        for (int64_t c = 0; c < g.ci; ++c) {
            const S* plane = x.data() + (n * g.ci + c) * g.h * g.w;
            const S* kc = k.data() + c * g.kh * g.kw;
            S* op = out.data() + (n * g.ci + c) * g.oh * g.ow;
            for (int64_t oy = 0; oy < g.oh; ++oy)
                for (int64_t ox = 0; ox < g.ow; ++ox) {
                    double acc = 0;
                    for (int64_t ky = 0; ky < g.kh; ++ky) {
                        const int64_t iy = oy * g.sh + ky - g.pad_top;
                        if (iy < 0 || iy >= g.h) continue;
                        for (int64_t kx = 0; kx < g.kw; ++kx) {
                            const int64_t ix = ox * g.sw + kx - g.pad_left;
                            if (ix < 0 || ix >= g.w) continue;
                            acc += static_cast<double>(plane[iy * g.w + ix]) *
                                   static_cast<double>(kc[ky * g.kw + kx]);
                        }
                    }
                    op[oy * g.ow + ox] = static_cast<S>(acc);
                }
        }
    finish_conv<S>("depthwise_conv2d", {x, k}, out, [x, k, out, g]() mutable {
        if (x.requires_grad()) x.ensure_grad();
        if (k.requires_grad()) k.ensure_grad();
        for (int64_t n = 0; n < g.n; ++n)
            for (int64_t c = 0; c < g.ci; ++c) {
                const S* plane = x.data() + (n * g.ci + c) * g.h * g.w;
                const S* kc = k.data() + c * g.kh * g.kw;
                const S* og = out.grad().data() + (n * g.ci + c) * g.oh * g.ow;
                S* dplane = x.requires_grad() ? x.grad().data() + (n * g.ci + c) * g.h * g.w : nullptr;
                S* dk = k.requires_grad() ? k.grad().data() + c * g.kh * g.kw : nullptr;
                for (int64_t oy = 0; oy < g.oh; ++oy)
                    for (int64_t ox = 0; ox < g.ow; ++ox) {
                        const S go = og[oy * g.ow + ox];
                        if (go == S(0)) continue;
                        for (int64_t ky = 0; ky < g.kh; ++ky) {
                            const int64_t iy = oy * g.sh + ky - g.pad_top;
                            if (iy < 0 || iy >= g.h) continue;
                            for (int64_t kx = 0; kx < g.kw; ++kx) {
                                const int64_t ix = ox * g.sw + kx - g.pad_left;
                                if (ix < 0 || ix >= g.w) continue;
                                if (dplane) dplane[iy * g.w + ix] += go * kc[ky * g.kw + kx];
                                if (dk) dk[ky * g.kw + kx] += go * plane[iy * g.w + ix];
                            }
                        }
                    }
            }
    });
    return out;
}

template <typename S>
Tensor<S> depthwise_separable_conv2d(Tensor<S> x, Tensor<S> depth_k, Tensor<S> point_k,
                                     Stride stride, Padding padding) {
    if (point_k.rank() != 4 || point_k.dim(2) != 1 || point_k.dim(3) != 1)
        throw DimensionError("depthwise_separable_conv2d: point kernel must be Ox" +
                             std::to_string(x.dim(1)) + "x1x1, got " + shape_str(point_k.shape()));
    if (point_k.dim(1) != x.dim(1))
        throw DimensionError("depthwise_separable_conv2d: point kernel input channels " +
                             std::to_string(point_k.dim(1)) + " vs input channels " +
                             std::to_string(x.dim(1)));
    auto mid = depthwise_conv2d(x, depth_k, stride, padding);
    return conv2d(mid, point_k, Stride{1, 1}, padding);
}

template <typename S>
Tensor<S> bias_nchw(Tensor<S> x, Tensor<S> b) {
    if (x.rank() != 4) throw DimensionError("bias_nchw: expected NCHW, got " + shape_str(x.shape()));
    const int64_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    if (b.numel() != c)
        throw DimensionError("bias_nchw: bias extent " + std::to_string(b.numel()) + " vs channels " +
                             std::to_string(c));
    auto out = Tensor<S>::zeros(x.shape());
    for (int64_t g = 0; g < n * c; ++g) {
        const S bc = b.data()[g % c];
        const S* xs = x.data() + g * hw;
        S* os = out.data() + g * hw;
        for (int64_t j = 0; j < hw; ++j) os[j] = xs[j] + bc;
    }
    finish_conv<S>("bias_nchw", {x, b}, out, [x, b, out, n, c, hw]() mutable {
        if (x.requires_grad()) x.grad_vec() += out.grad_vec();
        if (!b.requires_grad()) return;
        b.ensure_grad();
        for (int64_t g = 0; g < n * c; ++g) {
            double acc = 0;
            const S* og = out.grad().data() + g * hw;
            for (int64_t j = 0; j < hw; ++j) acc += og[j];
            b.grad()[static_cast<size_t>(g % c)] += static_cast<S>(acc);
        }
    });
    return out;
}

template <typename S>
Tensor<S> adaptive_max_pool_vertical(Tensor<S> x) {
    if (x.rank() != 4) throw DimensionError("adaptive_max_pool_vertical: expected NCHW");
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    auto out = Tensor<S>::zeros({n, c, 1, w});
    std::vector<int32_t> argmax(static_cast<size_t>(n * c * w));
    for (int64_t g = 0; g < n * c; ++g) {
        const S* plane = x.data() + g * h * w;
        for (int64_t col = 0; col < w; ++col) {
            S best = plane[col];
            int32_t row = 0;
            for (int64_t y = 1; y < h; ++y)
                if (plane[y * w + col] > best) {
                    best = plane[y * w + col];
                    row = static_cast<int32_t>(y);
                }
            out.data()[g * w + col] = best;
            argmax[static_cast<size_t>(g * w + col)] = row;
        }
    }
    finish_conv<S>("adaptive_max_pool_vertical", {x}, out,
                   [x, out, n, c, h, w, argmax = std::move(argmax)]() mutable {
                       if (!x.requires_grad()) return;
                       x.ensure_grad();
                       for (int64_t g = 0; g < n * c; ++g)
                           for (int64_t col = 0; col < w; ++col) {
                               const int64_t row = argmax[static_cast<size_t>(g * w + col)];
                               x.grad()[static_cast<size_t>(g * h * w + row * w + col)] +=
                                   out.grad()[static_cast<size_t>(g * w + col)];
                           }
                   });
    return out;
}

#define SCRIV_INSTANTIATE_CONV(S)                                                                             \
    template Tensor<S> conv2d<S>(Tensor<S>, Tensor<S>, Stride, Padding);                        \
    template Tensor<S> depthwise_conv2d<S>(Tensor<S>, Tensor<S>, Stride, Padding);              \
    template Tensor<S> depthwise_separable_conv2d<S>(Tensor<S>, Tensor<S>, Tensor<S>,                       \
                                                     Stride, Padding);                                        \
    template Tensor<S> bias_nchw<S>(Tensor<S>, Tensor<S>);                                      \
    template Tensor<S> adaptive_max_pool_vertical<S>(Tensor<S>);

SCRIV_INSTANTIATE_CONV(float)
SCRIV_INSTANTIATE_CONV(double)

}  // namespace scriv
