// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include "hcgnn/diffcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hcgnn/diffcore/error.hpp"

namespace hcgnn::diff {

GradMap finite_diff_grad(const std::function<double(const ParamStore&)>& f, ParamStore& params,
                         double eps) {
    if (!(eps > 0.0)) throw Fault("finite_diff_grad needs eps > 0");
    GradMap out(params.size());
    for (ParamId id = 0; id < params.size(); ++id) {
        auto& t = params[id].tensor;
        Tensor g(t.shape(), 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double orig = t[i];
            t[i] = orig + eps;
            const double up = f(params);
            t[i] = orig - eps;
            const double down = f(params);
            t[i] = orig;
            if (!std::isfinite(up) || !std::isfinite(down))
                throw NumericFault("finite_diff_grad objective on " + params[id].name, i);
            g[i] = (up - down) / (2.0 * eps);
        }
        out[id] = std::move(g);
    }
    return out;
}

GradCheckResult compare_gradients(const GradMap& analytic, const GradMap& numeric,
                                  const ParamStore& params, double floor) {
    GradCheckResult res;
    for (ParamId id = 0; id < params.size(); ++id) {
        const auto n = params[id].tensor.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double a = (id < analytic.size() && !analytic[id].empty()) ? analytic[id][i] : 0.0;
            const double d = (id < numeric.size() && !numeric[id].empty()) ? numeric[id][i] : 0.0;
            const double rel = std::fabs(a - d) / std::max({std::fabs(a), std::fabs(d), floor});
            if (rel > res.max_rel_error) {
                res = GradCheckResult{rel, params[id].name, i, a, d};
            }
        }
    }
    return res;
}

}  // namespace hcgnn::diff
