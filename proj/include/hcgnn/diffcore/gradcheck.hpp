// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "hcgnn/diffcore/tape.hpp"

namespace hcgnn::diff {

/// Central differences (f(θ+εe) − f(θ−εe)) / 2ε for every coordinate of
/// every parameter. `params` is perturbed in place and restored.
GradMap finite_diff_grad(const std::function<double(const ParamStore&)>& f, ParamStore& params,
                         double eps = 1e-5);

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// |a − n| / max(|a|, |n|, floor), maximised over all coordinates. Empty
/// entries count as zero gradients.
GradCheckResult compare_gradients(const GradMap& analytic, const GradMap& numeric,
                                  const ParamStore& params, double floor = 1e-6);

}  // namespace hcgnn::diff
