// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/velocity_model.hpp"

namespace flowpref::flow {

using VelocityField = std::function<Vec(std::span<const double> a, double t)>;

/// Classifier-free guidance: (1 - gamma) u_null + gamma u_cond, which equals
/// u_null + gamma (u_cond - u_null) and is exact at gamma = 0 and gamma = 1.
Vec guided_velocity(const VelocityModel& model, std::span<const double> a_t, double t, const Condition& cond,
                    double gamma);

/// Euler integration from t = 1 down to t = 0 in n_steps equal steps:
/// a <- a - (1/n) u(a, t_k), t_k = 1 - k/n. Throws NumericError with the step
/// index if the state stops being finite.
Vec integrate_euler(const VelocityField& field, Vec start, std::size_t n_steps);

/// Guided Euler sampling from a given starting noise vector.
Vec sample_from_noise(const VelocityModel& model, const Condition& cond, double gamma, std::size_t n_steps,
                      Vec noise);

/// Draws the starting noise from `rng`, then sample_from_noise().
Vec sample(const VelocityModel& model, const Condition& cond, double gamma, std::size_t n_steps, Rng& rng);

}  // namespace flowpref::flow
