// SPDX-License-Identifier: Apache-2.0
//
// CTC forward/backward over the blank-augmented target in log space.
// alpha_t(s) includes the emission at t, beta_t(s) excludes it, so
// alpha + beta is the log mass of all paths through (t, s).
#include <algorithm>
#include <cmath>
#include <limits>

#include "scriv/ops.hpp"

namespace scriv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

template <typename S>
Tensor<S> ctc_loss(Tensor<S> log_probs, const std::vector<int>& target, int blank_id) {
    if (log_probs.rank() != 2) throw DimensionError("ctc_loss: log_probs must be T x (A+1)");
    const int64_t t_len = log_probs.dim(0);
    const int64_t k_cls = log_probs.dim(1);
    if (blank_id < 0 || blank_id >= k_cls)
        throw DomainError("ctc_loss: blank_id " + std::to_string(blank_id) + " outside " +
                          std::to_string(k_cls) + " classes");
    for (int c : target) {
        if (c < 0 || c >= k_cls)
            throw DomainError("ctc_loss: target label " + std::to_string(c) + " outside " +
                              std::to_string(k_cls) + " classes");
        if (c == blank_id) throw DomainError("ctc_loss: target contains the blank label");
    }
    // Minimum frames: every label plus one blank between equal neighbours.
    int64_t min_frames = static_cast<int64_t>(target.size());
    for (size_t i = 1; i < target.size(); ++i)
        if (target[i] == target[i - 1]) ++min_frames;
    if (t_len < min_frames)
        throw InfeasibleTargetError("ctc_loss: target needs at least " + std::to_string(min_frames) +
                                    " frames, got " + std::to_string(t_len) + "; loss is +inf");

    const int64_t u = 2 * static_cast<int64_t>(target.size()) + 1;
    auto aug = [&](int64_t s) { return (s % 2 == 0) ? blank_id : target[static_cast<size_t>(s / 2)]; };
    auto lp = [&](int64_t t, int64_t s) {
        return static_cast<double>(log_probs.data()[t * k_cls + aug(s)]);
    };

    std::vector<double> alpha(static_cast<size_t>(t_len * u), kNegInf);
    alpha[0] = lp(0, 0);
    if (u > 1) alpha[1] = lp(0, 1);
    for (int64_t t = 1; t < t_len; ++t)
        for (int64_t s = 0; s < u; ++s) {
            double best = alpha[static_cast<size_t>((t - 1) * u + s)];
            if (s >= 1) best = lse2(best, alpha[static_cast<size_t>((t - 1) * u + s - 1)]);
            if (s >= 2 && aug(s) != blank_id && aug(s) != aug(s - 2))
                best = lse2(best, alpha[static_cast<size_t>((t - 1) * u + s - 2)]);
            if (best != kNegInf) alpha[static_cast<size_t>(t * u + s)] = best + lp(t, s);
        }
    double log_p = alpha[static_cast<size_t>((t_len - 1) * u + u - 1)];
    if (u > 1) log_p = lse2(log_p, alpha[static_cast<size_t>((t_len - 1) * u + u - 2)]);
    if (log_p == kNegInf)
        throw InfeasibleTargetError("ctc_loss: no feasible alignment (a required class has -inf log-prob)");

    auto out = Tensor<S>::scalar(static_cast<S>(-log_p));
    check_finite(out, "ctc_loss");
    out.set_requires_grad(log_probs.requires_grad());
    if (log_probs.requires_grad() && Tape<S>::active()) {
        Tape<S>::active()->record(
            "ctc_loss", {log_probs},
            [log_probs, out, target, blank_id, t_len, k_cls, u, log_p, alpha = std::move(alpha)]() mutable {
                auto aug = [&](int64_t s) {
                    return (s % 2 == 0) ? blank_id : target[static_cast<size_t>(s / 2)];
                };
                auto lp = [&](int64_t t, int64_t s) {
                    return static_cast<double>(log_probs.data()[t * k_cls + aug(s)]);
                };
                std::vector<double> beta(static_cast<size_t>(t_len * u), kNegInf);
                beta[static_cast<size_t>((t_len - 1) * u + u - 1)] = 0.0;
                if (u > 1) beta[static_cast<size_t>((t_len - 1) * u + u - 2)] = 0.0;
                for (int64_t t = t_len - 2; t >= 0; --t)
                    for (int64_t s = 0; s < u; ++s) {
                        double acc = beta[static_cast<size_t>((t + 1) * u + s)] + lp(t + 1, s);
                        if (s + 1 < u)
                            acc = lse2(acc, beta[static_cast<size_t>((t + 1) * u + s + 1)] + lp(t + 1, s + 1));
                        if (s + 2 < u && aug(s + 2) != blank_id && aug(s + 2) != aug(s))
                            acc = lse2(acc, beta[static_cast<size_t>((t + 1) * u + s + 2)] + lp(t + 1, s + 2));
                        beta[static_cast<size_t>(t * u + s)] = acc;
                    }
                const S g = out.grad()[0];
                log_probs.ensure_grad();
                std::vector<double> class_mass(static_cast<size_t>(k_cls));
                for (int64_t t = 0; t < t_len; ++t) {
                    std::fill(class_mass.begin(), class_mass.end(), kNegInf);
                    for (int64_t s = 0; s < u; ++s) {
                        const double m = alpha[static_cast<size_t>(t * u + s)] +
                                         beta[static_cast<size_t>(t * u + s)];
                        if (m == kNegInf) continue;
                        auto& cm = class_mass[static_cast<size_t>(aug(s))];
                        cm = lse2(cm, m);
                    }
                    for (int64_t c = 0; c < k_cls; ++c) {
                        const double m = class_mass[static_cast<size_t>(c)];
                        if (m == kNegInf) continue;
                        log_probs.grad()[static_cast<size_t>(t * k_cls + c)] +=
                            g * static_cast<S>(-std::exp(m - log_p));
                    }
                }
            });
    }
    return out;
}

template Tensor<float> ctc_loss<float>(Tensor<float>, const std::vector<int>&, int);
template Tensor<double> ctc_loss<double>(Tensor<double>, const std::vector<int>&, int);

}  // namespace scriv
