// SPDX-License-Identifier: Apache-2.0
#include "flowpref/flow/sampler.hpp"

#include <cmath>
#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::flow {

Vec guided_velocity(const VelocityModel& model, std::span<const double> a_t, double t, const Condition& cond,
                    double gamma) {
    Condition conditional = cond;
    conditional.drop_flag = false;
    if (gamma == 1.0) {
        return model.velocity(a_t, t, conditional);
    }
    Condition dropped = cond;
    dropped.drop_flag = true;
    Vec u_null = model.velocity(a_t, t, dropped);
    if (gamma == 0.0) {
        return u_null;
    }
    const Vec u_cond = model.velocity(a_t, t, conditional);
    for (std::size_t i = 0; i < u_null.size(); ++i) {
        u_null[i] = (1.0 - gamma) * u_null[i] + gamma * u_cond[i];
    }
    return u_null;
}

Vec integrate_euler(const VelocityField& field, Vec start, std::size_t n_steps) {
    if (n_steps == 0) {
        throw InputError("integrate_euler: n_steps must be at least 1");
    }
    const double dt = 1.0 / static_cast<double>(n_steps);
    Vec a = std::move(start);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = 1.0 - static_cast<double>(k) * dt;
        const Vec u = field(a, t);
        if (u.size() != a.size()) {
            throw InputError("integrate_euler: velocity field returned the wrong dimension");
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] -= dt * u[i];
            if (!std::isfinite(a[i])) {
                throw NumericError("integrate_euler: non-finite state at step " + std::to_string(k));
            }
        }
    }
    return a;
}

Vec sample_from_noise(const VelocityModel& model, const Condition& cond, double gamma, std::size_t n_steps,
                      Vec noise) {
    if (noise.size() != model.dim()) {
        throw InputError("sample_from_noise: noise has the wrong dimension");
    }
    return integrate_euler(
        [&](std::span<const double> a, double t) { return guided_velocity(model, a, t, cond, gamma); },
        std::move(noise), n_steps);
}

Vec sample(const VelocityModel& model, const Condition& cond, double gamma, std::size_t n_steps, Rng& rng) {
    return sample_from_noise(model, cond, gamma, n_steps, standard_normal(rng, model.dim()));
}

}  // namespace flowpref::flow
