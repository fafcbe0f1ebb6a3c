// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>

#include "flowpref/common/rng.hpp"

namespace flowpref::nn {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h for every coordinate.
Vec finite_diff_grad(const ScalarFn& loss_fn, std::span<const double> params, double h = 1e-5);

/// Largest |a - b| / max(|a|, |b|, floor) over coordinates. The floor keeps
/// coordinates whose true gradient is ~0 from dominating through roundoff.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                          double floor = 1e-3);

}  // namespace flowpref::nn
