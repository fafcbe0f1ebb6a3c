// SPDX-License-Identifier: Apache-2.0
#include "flowpref/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "flowpref/common/errors.hpp"

namespace flowpref::nn {

Vec finite_diff_grad(const ScalarFn& loss_fn, std::span<const double> params, double h) {
    Vec p(params.begin(), params.end());
    Vec grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double original = p[i];
        p[i] = original + h;
        const double up = loss_fn(p);
        p[i] = original - h;
        const double down = loss_fn(p);
        p[i] = original;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric, double floor) {
    if (analytic.size() != numeric.size()) {
        throw InputError("max_relative_error: length mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
    return worst;
}

}  // namespace flowpref::nn
