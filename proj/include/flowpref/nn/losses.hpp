// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

#include "flowpref/common/rng.hpp"

namespace flowpref::nn {

/// Probabilities are clamped to this floor before taking a log.
inline constexpr double kLogProbFloor = 1e-12;

/// Max-subtracted softmax. Throws InputError on non-finite logits.
Vec softmax(std::span<const double> logits);

/// -log(max(probs[label], kLogProbFloor)).
double cross_entropy(std::span<const double> probs, std::size_t label);

/// d cross_entropy(softmax(z), label) / dz = softmax(z) - onehot(label).
/// The clamp floor is ignored here; it only matters once a probability has
/// collapsed below 1e-12.
Vec softmax_cross_entropy_grad(std::span<const double> probs, std::size_t label);

/// log(1 + exp(x)) without overflow.
double softplus(double x);
double sigmoid(double x);

}  // namespace flowpref::nn
