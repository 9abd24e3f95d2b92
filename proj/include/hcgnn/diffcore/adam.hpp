// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "hcgnn/diffcore/tape.hpp"

namespace hcgnn::diff {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Tensor m;
    Tensor v;
    std::uint64_t step = 0;

    static AdamState like(const Tensor& param);
};

/// One bias-corrected Adam step on a single tensor.
void adam_update(Tensor& param, const Tensor& grad, AdamState& state, double lr,
                 const AdamConfig& cfg = {});

/// Linear warmup 0 → base_lr over [0, warmup_steps], then linear decay to 0
/// at total_steps (or flat at base_lr when `constant_after_warmup`).
/// Steps past total_steps give 0.
double lr_at_step(std::uint64_t step, double base_lr, std::uint64_t warmup_steps,
                  std::uint64_t total_steps, bool constant_after_warmup = false);

/// Adam over every parameter of a store.
class Adam {
public:
    Adam() = default;
    Adam(const ParamStore& params, AdamConfig cfg);

    /// Applies the stored grads with learning rate `lr`.
    void step(ParamStore& params, double lr);

    const std::vector<AdamState>& states() const noexcept { return states_; }
    std::vector<AdamState>& states() noexcept { return states_; }
    const AdamConfig& config() const noexcept { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<AdamState> states_;
};

}  // namespace hcgnn::diff
