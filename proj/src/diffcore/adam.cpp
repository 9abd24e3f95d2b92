// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/diffcore/adam.hpp"

#include <cmath>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::diff {

AdamState AdamState::like(const Tensor& param) {
    return AdamState{Tensor(param.shape(), 0.0), Tensor(param.shape(), 0.0), 0};
}

void adam_update(Tensor& param, const Tensor& grad, AdamState& state, double lr,
                 const AdamConfig& cfg) {
    if (!param.same_shape(grad) || !param.same_shape(state.m) || !param.same_shape(state.v))
        throw Fault("adam_update shape mismatch: param " + shape_string(param.shape()) +
                    ", grad " + shape_string(grad.shape()));
    state.step += 1;
    const auto t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        param[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

double lr_at_step(std::uint64_t step, double base_lr, std::uint64_t warmup_steps,
                  std::uint64_t total_steps, bool constant_after_warmup) {
    if (warmup_steps >= total_steps) throw Fault("lr schedule needs warmup_steps < total_steps");
    if (step > total_steps) return 0.0;
    if (step < warmup_steps)
        return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
    if (constant_after_warmup) return base_lr;
    return base_lr * static_cast<double>(total_steps - step) /
           static_cast<double>(total_steps - warmup_steps);
}

Adam::Adam(const ParamStore& params, AdamConfig cfg) : cfg_(cfg) {
    states_.reserve(params.size());
    for (const auto& p : params) states_.push_back(AdamState::like(p.tensor));
}

void Adam::step(ParamStore& params, double lr) {
    if (states_.size() != params.size()) throw Fault("optimizer built for a different model");
    for (ParamId id = 0; id < params.size(); ++id)
        adam_update(params[id].tensor, params[id].grad, states_[id], lr, cfg_);
}

}  // namespace hcgnn::diff
