// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scriv/tensor.hpp"

namespace scriv {

// Per-parameter Adam moments. One state drives one parameter set; t strictly
// increases by one per step.
template <typename S>
struct AdamState {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int64_t t = 0;
    std::vector<std::vector<S>> m;
    std::vector<std::vector<S>> v;

    void reset() {
        t = 0;
        m.clear();
        v.clear();
    }
};

// Standard bias-corrected Adam update. Parameters are updated in place from
// their accumulated gradients; gradients are cleared afterwards.
template <typename S>
void adam_step(std::vector<Tensor<S>>& params, AdamState<S>& state) {
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (size_t i = 0; i < params.size(); ++i) {
            state.m[i].assign(static_cast<size_t>(params[i].numel()), S(0));
            state.v[i].assign(static_cast<size_t>(params[i].numel()), S(0));
        }
    }
    if (state.m.size() != params.size())
        throw ContractError("adam_step: state tracks " + std::to_string(state.m.size()) +
                            " parameters, got " + std::to_string(params.size()));
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        if (state.m[i].size() != static_cast<size_t>(p.numel()))
            throw ContractError("adam_step: moment shape mismatch for parameter '" + p.name() + "'");
        if (!p.has_grad()) continue;  // untouched this step
        auto& g = p.grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (size_t j = 0; j < g.size(); ++j) {
            const double gj = static_cast<double>(g[j]);
            if (!std::isfinite(gj))
                throw NumericError("adam_step: non-finite gradient for parameter '" + p.name() + "'");
            const double mj = state.beta1 * static_cast<double>(m[j]) + (1.0 - state.beta1) * gj;
            const double vj = state.beta2 * static_cast<double>(v[j]) + (1.0 - state.beta2) * gj * gj;
            m[j] = static_cast<S>(mj);
            v[j] = static_cast<S>(vj);
            const double mhat = mj / bc1;
            const double vhat = vj / bc2;
            p.data()[j] -= static_cast<S>(state.lr * mhat / (std::sqrt(vhat) + state.eps));
        }
        p.zero_grad();
    }
}

}  // namespace scriv
