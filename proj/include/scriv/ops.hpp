// SPDX-License-Identifier: Apache-2.0
//
// The op vocabulary of the network: elementwise, linear-algebra,
// normalization, convolution and loss primitives, each differentiable
// through the active tape where meaningful. Shapes follow NCHW for images
// and rows=positions for sequence data.
#pragma once

#include "scriv/tensor.hpp"

namespace scriv {

struct Stride {
    int h = 1;
    int w = 1;
};

enum class Padding { same, valid };

// ---- elementwise / structural ----
template <typename S> Tensor<S> add(Tensor<S> a, Tensor<S> b);
template <typename S> Tensor<S> sub(Tensor<S> a, Tensor<S> b);
template <typename S> Tensor<S> mul(Tensor<S> a, Tensor<S> b);
template <typename S> Tensor<S> scale(Tensor<S> a, S k);
template <typename S> Tensor<S> relu(Tensor<S> a);
template <typename S> Tensor<S> gelu(Tensor<S> a);
// Inverted dropout; identity when p == 0 or training == false.
template <typename S> Tensor<S> dropout(Tensor<S> a, double p, Rng& rng, bool training);
template <typename S> Tensor<S> reshape(Tensor<S> a, Shape new_shape);
template <typename S> Tensor<S> flatten(Tensor<S> a);
template <typename S> Tensor<S> concat(Tensor<S> a, Tensor<S> b, int axis);
template <typename S> Tensor<S> slice(Tensor<S> a, int axis, int64_t start, int64_t len);
template <typename S> Tensor<S> transpose2d(Tensor<S> a);
template <typename S> Tensor<S> sum(Tensor<S> a);
template <typename S> Tensor<S> mean(Tensor<S> a);

// ---- linear algebra ----
template <typename S>
Tensor<S> matmul(Tensor<S> a, Tensor<S> b, bool trans_a = false, bool trans_b = false);
// x [N x Din] * w [Din x Dout] + b broadcast over rows. b may be undefined.
template <typename S> Tensor<S> linear(Tensor<S> x, Tensor<S> w, Tensor<S> b);
template <typename S> Tensor<S> embedding_lookup(Tensor<S> table, const std::vector<int>& ids);

// ---- normalization / softmax (last axis of a 2-d view) ----
template <typename S> Tensor<S> softmax(Tensor<S> a);
template <typename S> Tensor<S> log_softmax(Tensor<S> a);
template <typename S>
Tensor<S> layer_norm(Tensor<S> x, Tensor<S> gamma, Tensor<S> beta, double eps = 1e-5);
// x NCHW, gamma/beta per channel; normalizes each (n, c) slab over H*W.
template <typename S>
Tensor<S> instance_norm(Tensor<S> x, Tensor<S> gamma, Tensor<S> beta, double eps = 1e-5);

// ---- convolution / pooling ----
// x [N,I,H,W], k [O,I,Kh,Kw]. `same` zero-pads to ceil(H/sh) x ceil(W/sw).
template <typename S>
Tensor<S> conv2d(Tensor<S> x, Tensor<S> k, Stride stride, Padding padding);
// k [C,1,Kh,Kw], one filter per input channel.
template <typename S>
Tensor<S> depthwise_conv2d(Tensor<S> x, Tensor<S> k, Stride stride, Padding padding);
// depth_k [C,1,Kh,Kw] then point_k [O,C,1,1].
template <typename S>
Tensor<S> depthwise_separable_conv2d(Tensor<S> x, Tensor<S> depth_k, Tensor<S> point_k,
                                     Stride stride, Padding padding = Padding::same);
// Per-channel bias over an NCHW map.
template <typename S> Tensor<S> bias_nchw(Tensor<S> x, Tensor<S> b);
// NCHW -> NC1W, max over the vertical axis.
template <typename S> Tensor<S> adaptive_max_pool_vertical(Tensor<S> x);

// ---- losses ----
// logits [N x V]; mean of -log softmax(logits)[target] over targets != ignore_id.
template <typename S>
Tensor<S> cross_entropy(Tensor<S> logits, const std::vector<int>& target_ids, int ignore_id);
// log_probs [T x (A+1)] where column blank_id is the blank. Returns
// -log P(target | log_probs) marginalized over monotonic alignments.
template <typename S>
Tensor<S> ctc_loss(Tensor<S> log_probs, const std::vector<int>& target, int blank_id);

// Output spatial extent for one axis under the padding rule.
int64_t conv_out_extent(int64_t in, int kernel, int stride, Padding padding);

// Throws NumericError if any value is not finite. Every op calls this on its
// output; NaN/Inf is an error state, never silently propagated.
template <typename S> void check_finite(const Tensor<S>& t, const char* op);

}  // namespace scriv
