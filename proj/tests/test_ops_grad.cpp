// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference checks for every differentiable op, plus the handful of
// closed-form forward examples. All checks run at 64 bit.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "scriv/ops.hpp"

using namespace scriv;

namespace {
constexpr double kTol = 1e-4;

Shape random_2d(Rng& rng) {
    return {static_cast<int64_t>(1 + rng.below(5)), static_cast<int64_t>(1 + rng.below(7))};
}
}  // namespace

TEST_CASE("elementwise ops: fd check on 20+ random shapes") {
    Rng rng(11);
    for (int trial = 0; trial < 24; ++trial) {
        auto shape = random_2d(rng);
        auto x = oracle::random_tensor(shape, rng);
        auto y = oracle::random_tensor(shape, rng);
        y.set_requires_grad(true);

        CHECK(oracle::grad_check(x, [&] { return sum(add(x, y)); }) < kTol);
        CHECK(oracle::grad_check(x, [&] { return sum(sub(x, y)); }) < kTol);
        CHECK(oracle::grad_check(x, [&] { return sum(mul(x, y)); }) < kTol);
        CHECK(oracle::grad_check(x, [&] { return sum(scale(x, 1.7)); }) < kTol);
        CHECK(oracle::grad_check(x, [&] { return sum(mul(relu(x), relu(x))); }) < kTol);
        CHECK(oracle::grad_check(x, [&] { return sum(gelu(x)); }) < kTol);
        CHECK(oracle::grad_check(x, [&] { return mean(mul(x, x)); }) < kTol);
    }
}

TEST_CASE("structural ops: reshape/concat/slice/transpose") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto shape = random_2d(rng);
        auto x = oracle::random_tensor(shape, rng);
        auto y = oracle::random_tensor(shape, rng);
        CHECK(oracle::grad_check(x, [&] { return sum(mul(flatten(x), flatten(x))); }) < kTol);
        const int axis = static_cast<int>(rng.below(2));
        CHECK(oracle::grad_check(x, [&] {
                  auto c = concat(x, y, axis);
                  return sum(mul(c, c));
              }) < kTol);
        const int64_t len = 1 + static_cast<int64_t>(rng.below(static_cast<uint64_t>(shape[1])));
        CHECK(oracle::grad_check(x, [&] {
                  auto s = slice(x, 1, shape[1] - len, len);
                  return sum(mul(s, s));
              }) < kTol);
        CHECK(oracle::grad_check(x, [&] {
                  auto t = transpose2d(x);
                  return sum(mul(t, t));
              }) < kTol);
    }
}

TEST_CASE("dropout: identity when p=0 or eval; mask applies in training") {
    Rng rng(13);
    auto x = oracle::random_tensor({4, 4}, rng);
    Rng d1(5);
    auto eval_out = dropout(x, 0.5, d1, false);
    for (int64_t i = 0; i < x.numel(); ++i) CHECK(eval_out.data()[i] == x.data()[i]);
    Rng d2(5);
    auto zero_out = dropout(x, 0.0, d2, true);
    for (int64_t i = 0; i < x.numel(); ++i) CHECK(zero_out.data()[i] == x.data()[i]);
    // gradient flows through the same mask that the forward pass applied
    x.set_requires_grad(true);
    Tape<double> tape;
    Rng d3(7);
    auto out = dropout(x, 0.5, d3, true);
    tape.backward(sum(out));
    for (int64_t i = 0; i < x.numel(); ++i) {
        const bool kept = out.data()[i] != 0.0;
        CHECK(x.grad()[static_cast<size_t>(i)] == (kept ? 2.0 : 0.0));
    }
}

TEST_CASE("matmul fd check, all transpose combinations") {
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const int64_t m = 1 + static_cast<int64_t>(rng.below(4));
        const int64_t k = 1 + static_cast<int64_t>(rng.below(4));
        const int64_t n = 1 + static_cast<int64_t>(rng.below(4));
        const bool ta = rng.bernoulli(0.5), tb = rng.bernoulli(0.5);
        auto a = oracle::random_tensor(ta ? Shape{k, m} : Shape{m, k}, rng);
        auto b = oracle::random_tensor(tb ? Shape{n, k} : Shape{k, n}, rng);
        auto f = [&] {
            auto c = matmul(a, b, ta, tb);
            return sum(mul(c, c));
        };
        CHECK(oracle::grad_check(a, f) < kTol);
        CHECK(oracle::grad_check(b, f) < kTol);
    }
    CHECK_THROWS_AS(matmul(Tensor<double>::zeros({2, 3}), Tensor<double>::zeros({2, 3})), DimensionError);
}

TEST_CASE("linear fd check including bias") {
    Rng rng(15);
    for (int trial = 0; trial < 8; ++trial) {
        auto x = oracle::random_tensor({3, 4}, rng);
        auto w = oracle::random_tensor({4, 5}, rng);
        auto b = oracle::random_tensor({5}, rng);
        auto f = [&] {
            auto ylin = linear(x, w, b);
            return sum(mul(ylin, ylin));
        };
        CHECK(oracle::grad_check(x, f) < kTol);
        CHECK(oracle::grad_check(w, f) < kTol);
        CHECK(oracle::grad_check(b, f) < kTol);
    }
}

TEST_CASE("embedding lookup scatters gradients to looked-up rows") {
    Rng rng(16);
    auto table = oracle::random_tensor({6, 3}, rng);
    std::vector<int> ids{1, 4, 1};
    CHECK(oracle::grad_check(table, [&] {
              auto e = embedding_lookup(table, ids);
              return sum(mul(e, e));
          }) < kTol);
    CHECK_THROWS_AS(embedding_lookup(table, std::vector<int>{6}), DomainError);
}

TEST_CASE("softmax: symmetry example and row-sum invariant") {
    auto x = Tensor<double>::from({1, 3}, {0, 0, 0});
    auto y = softmax(x);
    for (int i = 0; i < 3; ++i) CHECK(y.data()[i] == doctest::Approx(1.0 / 3).epsilon(1e-9));

    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto t = oracle::random_tensor(random_2d(rng), rng, 2.0);
        auto s = softmax(t);
        const int64_t cols = t.shape().back();
        for (int64_t r = 0; r < t.numel() / cols; ++r) {
            double acc = 0;
            for (int64_t j = 0; j < cols; ++j) acc += s.data()[r * cols + j];
            CHECK(std::fabs(acc - 1.0) < 1e-6);
        }
        // log_softmax == log(softmax)
        auto ls = log_softmax(t);
        for (int64_t i = 0; i < t.numel(); ++i)
            CHECK(std::fabs(ls.data()[i] - std::log(s.data()[i])) < 1e-6);
    }
}

TEST_CASE("softmax family fd checks") {
    Rng rng(18);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = oracle::random_tensor(random_2d(rng), rng);
        CHECK(oracle::grad_check(x, [&] {
                  auto s = softmax(x);
                  return sum(mul(s, s));
              }) < kTol);
        CHECK(oracle::grad_check(x, [&] {
                  auto s = log_softmax(x);
                  return sum(mul(s, s));
              }) < kTol);
    }
}

TEST_CASE("layer_norm and instance_norm fd checks") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const int64_t rows = 1 + static_cast<int64_t>(rng.below(3));
        const int64_t cols = 2 + static_cast<int64_t>(rng.below(5));
        auto x = oracle::random_tensor({rows, cols}, rng);
        auto g = oracle::random_tensor({cols}, rng);
        auto b = oracle::random_tensor({cols}, rng);
        auto f = [&] {
            auto ylat = layer_norm(x, g, b);
            return sum(mul(ylat, ylat));
        };
        // finer step: 1/sqrt(var) makes the FD truncation term large at h=1e-3
        CHECK(oracle::grad_check(x, f, 1e-5) < kTol);
        CHECK(oracle::grad_check(g, f, 1e-5) < kTol);
        CHECK(oracle::grad_check(b, f, 1e-5) < kTol);
    }
    for (int trial = 0; trial < 20; ++trial) {
        const int64_t c = 1 + static_cast<int64_t>(rng.below(3));
        const int64_t h = 2 + static_cast<int64_t>(rng.below(3));
        const int64_t w = 2 + static_cast<int64_t>(rng.below(3));
        auto x = oracle::random_tensor({1, c, h, w}, rng);
        auto g = oracle::random_tensor({c}, rng);
        auto b = oracle::random_tensor({c}, rng);
        auto f = [&] {
            auto yin = instance_norm(x, g, b);
            return sum(mul(yin, yin));
        };
        CHECK(oracle::grad_check(x, f, 1e-5) < kTol);
        CHECK(oracle::grad_check(g, f, 1e-5) < kTol);
    }
}

TEST_CASE("conv2d forward examples") {
    // 1x1x4x4 ones, 1x1x3x3 ones, stride 1, same: center sees full overlap
    auto x = Tensor<double>::full({1, 1, 4, 4}, 1.0);
    auto k = Tensor<double>::full({1, 1, 3, 3}, 1.0);
    auto y = conv2d(x, k, Stride{1, 1}, Padding::same);
    CHECK(y.shape() == Shape{1, 1, 4, 4});
    CHECK(y.data()[1 * 4 + 1] == doctest::Approx(9.0));  // center value
    // stride 2, same: ceil(4/2) = 2
    auto y2 = conv2d(x, k, Stride{2, 2}, Padding::same);
    CHECK(y2.dim(2) == 2);
    CHECK(y2.dim(3) == 2);
    // shape mismatch names the offending axis
    auto bad = Tensor<double>::full({1, 2, 4, 4}, 1.0);
    CHECK_THROWS_AS(conv2d(bad, k, Stride{1, 1}, Padding::same), DimensionError);
    CHECK_THROWS_AS(conv2d(x, k, Stride{3, 1}, Padding::same), ContractError);
}

TEST_CASE("conv2d fd check on random inputs") {
    Rng rng(20);
    for (int trial = 0; trial < 6; ++trial) {
        auto x = oracle::random_tensor({1, 2, 5, 5}, rng);
        auto k = oracle::random_tensor({3, 2, 3, 3}, rng, 0.5);
        const Stride st{trial % 2 ? 2 : 1, trial % 3 ? 2 : 1};
        const Padding pad = trial % 2 ? Padding::same : Padding::valid;
        auto f = [&] {
            auto c = conv2d(x, k, st, pad);
            return sum(mul(c, c));
        };
        CHECK(oracle::grad_check(x, f) < kTol);
        CHECK(oracle::grad_check(k, f) < kTol);
    }
}

TEST_CASE("depthwise separable conv: identity composition and parameter count") {
    // depth kernel = ones 1x1, point kernel = identity mixing: output equals input
    auto x = Tensor<double>::from({1, 2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    auto dk = Tensor<double>::full({2, 1, 1, 1}, 1.0);
    auto pk = Tensor<double>::from({2, 2, 1, 1}, {1, 0, 0, 1});
    auto y = depthwise_separable_conv2d(x, dk, pk, Stride{1, 1});
    for (int64_t i = 0; i < x.numel(); ++i) CHECK(y.data()[i] == doctest::Approx(x.data()[i]));

    // parameter count vs dense 3x3: 4*9 + 4*8 = 68 vs 4*8*9 = 288
    const int64_t cin = 4, cout = 8;
    const int64_t separable = cin * 9 + cin * cout;
    const int64_t dense = cin * cout * 9;
    CHECK(separable == 68);
    CHECK(dense == 288);

    // channel mismatch
    auto bad_dk = Tensor<double>::full({3, 1, 1, 1}, 1.0);
    CHECK_THROWS_AS(depthwise_separable_conv2d(x, bad_dk, pk, Stride{1, 1}), DimensionError);
}

TEST_CASE("depthwise separable conv fd check") {
    Rng rng(21);
    for (int trial = 0; trial < 6; ++trial) {
        auto x = oracle::random_tensor({1, 2, 4, 4}, rng);
        auto dk = oracle::random_tensor({2, 1, 3, 3}, rng, 0.5);
        auto pk = oracle::random_tensor({3, 2, 1, 1}, rng, 0.5);
        auto f = [&] {
            auto c = depthwise_separable_conv2d(x, dk, pk, Stride{trial % 2 ? 2 : 1, 1});
            return sum(mul(c, c));
        };
        CHECK(oracle::grad_check(x, f) < kTol);
        CHECK(oracle::grad_check(dk, f) < kTol);
        CHECK(oracle::grad_check(pk, f) < kTol);
    }
}

TEST_CASE("adaptive max pool vertical: brute-force column maxima") {
    auto x = Tensor<double>::zeros({1, 1, 4, 3});
    Rng rng(22);
    for (int64_t i = 0; i < x.numel(); ++i) x.data()[i] = rng.normal();
    // plant the max of each column in row 2
    for (int64_t c = 0; c < 3; ++c) x.data()[2 * 3 + c] = 10.0 + static_cast<double>(c);
    auto y = adaptive_max_pool_vertical(x);
    CHECK(y.shape() == Shape{1, 1, 1, 3});
    for (int64_t c = 0; c < 3; ++c) {
        double best = -1e30;
        for (int64_t r = 0; r < 4; ++r) best = std::max(best, x.data()[r * 3 + c]);
        CHECK(y.data()[c] == doctest::Approx(best));
    }
    CHECK(oracle::grad_check(x, [&] {
              auto p = adaptive_max_pool_vertical(x);
              return sum(mul(p, p));
          }) < kTol);
}

TEST_CASE("bias_nchw fd check") {
    Rng rng(23);
    auto x = oracle::random_tensor({2, 3, 2, 2}, rng);
    auto b = oracle::random_tensor({3}, rng);
    auto f = [&] {
        auto ybias = bias_nchw(x, b);
        return sum(mul(ybias, ybias));
    };
    CHECK(oracle::grad_check(x, f) < kTol);
    CHECK(oracle::grad_check(b, f) < kTol);
}

TEST_CASE("cross entropy: uniform logits give ln v") {
    auto logits = Tensor<double>::zeros({1, 8});
    auto loss = cross_entropy(logits, {3}, 0);
    CHECK(loss.item() == doctest::Approx(std::log(8.0)).epsilon(1e-10));

    // ignored positions do not contribute
    auto two = Tensor<double>::zeros({2, 8});
    auto l2 = cross_entropy(two, {3, 0}, 0);  // second position is the ignore id
    CHECK(l2.item() == doctest::Approx(std::log(8.0)).epsilon(1e-10));

    CHECK_THROWS_AS(cross_entropy(two, {3, 9}, 0), DomainError);
    CHECK_THROWS_AS(cross_entropy(two, {3, 0}, 8), DomainError);  // ignore_id outside vocabulary
}

TEST_CASE("cross entropy fd check") {
    Rng rng(24);
    for (int trial = 0; trial < 10; ++trial) {
        auto logits = oracle::random_tensor({4, 5}, rng);
        std::vector<int> targets{1, 0, static_cast<int>(rng.below(5)), 3};
        CHECK(oracle::grad_check(logits, [&] { return cross_entropy(logits, targets, 0); }) < kTol);
    }
}

TEST_CASE("composite graph: conv -> norm -> dense -> cross_entropy") {
    Rng rng(25);
    auto x = oracle::random_tensor({1, 2, 6, 6}, rng);
    auto k = oracle::random_tensor({4, 2, 3, 3}, rng, 0.4);
    auto g = Tensor<double>::full({4}, 1.0);
    auto b = Tensor<double>::zeros({4});
    auto w = oracle::random_tensor({4 * 3 * 3, 7}, rng, 0.3);
    g.set_requires_grad(true);
    b.set_requires_grad(true);
    auto f = [&] {
        auto c = conv2d(x, k, Stride{2, 2}, Padding::same);
        auto n = instance_norm(c, g, b);
        auto flat = reshape(n, {1, 4 * 3 * 3});
        auto logits = matmul(flat, w);
        return cross_entropy(logits, {2}, 0);
    };
    CHECK(oracle::grad_check(x, f) < kTol);
    CHECK(oracle::grad_check(k, f) < kTol);
    CHECK(oracle::grad_check(w, f) < kTol);
}
