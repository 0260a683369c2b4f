// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scriv/ops.hpp"

using namespace scriv;

namespace {

Tensor<double> log_probs_from(const std::vector<std::vector<double>>& probs) {
    const int64_t t = static_cast<int64_t>(probs.size());
    const int64_t k = static_cast<int64_t>(probs[0].size());
    auto lp = Tensor<double>::zeros({t, k});
    for (int64_t i = 0; i < t; ++i)
        for (int64_t j = 0; j < k; ++j) lp.data()[i * k + j] = std::log(probs[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    return lp;
}

std::vector<std::vector<double>> random_dist_rows(size_t t, size_t k, Rng& rng) {
    std::vector<std::vector<double>> rows(t, std::vector<double>(k));
    for (auto& row : rows) {
        double z = 0;
        for (auto& p : row) {
            p = 0.05 + rng.uniform();
            z += p;
        }
        for (auto& p : row) p /= z;
    }
    return rows;
}

}  // namespace

TEST_CASE("worked example: T=2, two classes at 0.5, target 'a'") {
    // paths aa, a-, -a out of 4 -> P = 0.75
    const int blank = 1;
    auto lp = log_probs_from({{0.5, 0.5}, {0.5, 0.5}});
    auto loss = ctc_loss(lp, {0}, blank);
    CHECK(loss.item() == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
    CHECK(loss.item() == doctest::Approx(0.28768).epsilon(1e-4));
}

TEST_CASE("forced path: T=1, P(a)=1 gives zero loss") {
    auto lp = log_probs_from({{1.0 - 1e-300, 1e-300}});
    auto loss = ctc_loss(lp, {0}, 1);
    CHECK(loss.item() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("infeasible targets are flagged, not silent") {
    Rng rng(3);
    auto lp = log_probs_from(random_dist_rows(2, 3, rng));
    CHECK_THROWS_AS(ctc_loss(lp, {0, 0}, 2), InfeasibleTargetError);  // needs 3 frames (repeat)
    CHECK_THROWS_AS(ctc_loss(lp, {0, 1, 0}, 2), InfeasibleTargetError);
    CHECK_THROWS_AS(ctc_loss(lp, {2}, 2), DomainError);  // blank in target
    CHECK_THROWS_AS(ctc_loss(lp, {5}, 2), DomainError);
}

TEST_CASE("matches exhaustive path enumeration for all T<=6, |A|<=3, |target|<=3") {
    Rng rng(99);
    int checked = 0;
    for (size_t alpha = 1; alpha <= 3; ++alpha) {
        const int blank = static_cast<int>(alpha);  // classes 0..alpha-1 are labels
        for (size_t t = 1; t <= 6; ++t) {
            auto rows = random_dist_rows(t, alpha + 1, rng);
            auto lp = log_probs_from(rows);
            // every target over the alphabet with length 0..3
            std::vector<std::vector<int>> targets{{}};
            for (int len = 1; len <= 3; ++len) {
                std::vector<std::vector<int>> next;
                for (const auto& base : targets)
                    if (static_cast<int>(base.size()) == len - 1)
                        for (int c = 0; c < static_cast<int>(alpha); ++c) {
                            auto ext = base;
                            ext.push_back(c);
                            next.push_back(ext);
                        }
                targets.insert(targets.end(), next.begin(), next.end());
            }
            for (const auto& target : targets) {
                int64_t min_frames = static_cast<int64_t>(target.size());
                for (size_t i = 1; i < target.size(); ++i)
                    if (target[i] == target[i - 1]) ++min_frames;
                if (static_cast<int64_t>(t) < min_frames) continue;
                const double p_ref = oracle::ctc_enumerate(rows, target, blank);
                const double loss = ctc_loss(lp, target, blank).item();
                CHECK(std::fabs(loss - (-std::log(p_ref))) < 1e-9);
                ++checked;
            }
        }
    }
    CHECK(checked == 234);  // feasible (alphabet, T, target) combinations
}

TEST_CASE("empty target marginalizes to all-blank paths") {
    Rng rng(5);
    auto rows = random_dist_rows(4, 3, rng);
    auto lp = log_probs_from(rows);
    double p = 1.0;
    for (const auto& row : rows) p *= row[2];
    CHECK(ctc_loss(lp, {}, 2).item() == doctest::Approx(-std::log(p)).epsilon(1e-10));
}

TEST_CASE("ctc gradient fd check") {
    Rng rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        const size_t t = 3 + rng.below(3);
        auto lp = oracle::random_tensor({static_cast<int64_t>(t), 3}, rng);
        const std::vector<int> target = trial % 2 ? std::vector<int>{0, 1} : std::vector<int>{1};
        CHECK(oracle::grad_check(lp, [&] { return ctc_loss(lp, target, 2); }, 1e-4) < 1e-4);
    }
}

TEST_CASE("uniform-prediction baseline equals path-count closed form") {
    // With uniform rows, P = N_paths / k^T.
    const size_t t = 5, k = 3;
    std::vector<std::vector<double>> rows(t, std::vector<double>(k, 1.0 / 3));
    auto lp = log_probs_from(rows);
    const std::vector<int> target{0, 1};
    const int64_t n_paths = oracle::ctc_path_count(t, k, target, 2);
    const double expected = static_cast<double>(t) * std::log(3.0) - std::log(static_cast<double>(n_paths));
    CHECK(ctc_loss(lp, target, 2).item() == doctest::Approx(expected).epsilon(1e-10));
}
