// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scriv/ops.hpp"

using namespace scriv;

TEST_CASE("shape and storage invariants") {
    auto t = Tensor<float>::from({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.numel() == 6);
    CHECK(t.rank() == 2);
    CHECK(t.dim(1) == 3);
    CHECK_THROWS_AS(Tensor<float>::from({2, 2}, {1.f, 2.f, 3.f}), DimensionError);
    CHECK_THROWS_AS(Tensor<float>::zeros({0, 3}), DimensionError);
}

TEST_CASE("grad matches shape and is lazily allocated") {
    auto t = Tensor<float>::zeros({4}, true);
    CHECK(!t.has_grad());
    t.ensure_grad();
    CHECK(t.grad().size() == 4);
}

TEST_CASE("copies alias storage, detached_copy does not") {
    auto a = Tensor<float>::from({2}, {1, 2});
    auto b = a;
    b.data()[0] = 9;
    CHECK(a.data()[0] == 9);
    auto c = a.detached_copy();
    c.data()[0] = 5;
    CHECK(a.data()[0] == 9);
}

TEST_CASE("backward: loss = sum(x) gives ones") {
    auto x = Tensor<double>::from({2, 3}, {0.5, -1, 2, 3, 4, -2}, true);
    Tape<double> tape;
    auto loss = sum(x);
    tape.backward(loss);
    for (double g : x.grad()) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("backward: loss = sum(x*x) gives 2x") {
    auto x = Tensor<double>::from({4}, {0.5, -1, 2, 3}, true);
    Tape<double> tape;
    auto loss = sum(mul(x, x));
    tape.backward(loss);
    for (size_t i = 0; i < 4; ++i) CHECK(x.grad()[i] == doctest::Approx(2 * x.data()[i]));
}

TEST_CASE("backward contract errors") {
    auto x = Tensor<double>::from({3}, {1, 2, 3}, true);
    Tape<double> tape;
    auto y = mul(x, x);
    CHECK_THROWS_AS(tape.backward(y), ContractError);  // non-scalar
    auto loss = sum(y);
    tape.backward(loss);
    CHECK_THROWS_AS(tape.backward(loss), ContractError);  // repeated backward without reset
}

TEST_CASE("no tape means no recording") {
    auto x = Tensor<double>::from({3}, {1, 2, 3}, true);
    auto y = mul(x, x);
    CHECK(y.requires_grad());
    CHECK_THROWS_AS(backward(y), ContractError);
}

TEST_CASE("forward determinism: same inputs give bit-identical outputs") {
    Rng rng(77);
    auto x = Tensor<float>::zeros({3, 5});
    for (int64_t i = 0; i < x.numel(); ++i) x.data()[i] = static_cast<float>(rng.normal());
    auto a = softmax(x);
    auto b = softmax(x);
    for (int64_t i = 0; i < a.numel(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("non-finite forward output raises a numeric error") {
    auto x = Tensor<float>::from({2}, {1e38f, 1e38f});
    CHECK_THROWS_AS(mul(x, x), NumericError);
}
