// SPDX-License-Identifier: Apache-2.0
#include "flowpref/nn/adamw.hpp"

#include <cmath>

#include "flowpref/common/errors.hpp"
#include "flowpref/nn/mlp.hpp"

namespace flowpref::nn {

double warmup_lr(double base_lr, std::size_t warmup_steps, std::size_t step) {
    if (warmup_steps == 0 || step >= warmup_steps) {
        return base_lr;
    }
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
}

AdamW::AdamW(std::size_t num_params, AdamWConfig config)
    : config_(config), m_(num_params, 0.0), v_(num_params, 0.0) {
    if (!(config_.base_lr > 0.0) || config_.weight_decay < 0.0) {
        throw InputError("AdamW: base_lr must be positive and weight_decay non-negative");
    }
}

double AdamW::current_lr() const { return warmup_lr(config_.base_lr, config_.warmup_steps, step_count_); }

void AdamW::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw InputError("AdamW::step: parameter/gradient shape mismatch");
    }
    require_finite(grads, "AdamW::step gradients");

    const double lr = current_lr();
    const double t = static_cast<double>(step_count_ + 1);
    const double bc1 = 1.0 - std::pow(config_.beta1, t);
    const double bc2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
        v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= lr * (m_hat / (std::sqrt(v_hat) + config_.eps) + config_.weight_decay * params[i]);
    }
    ++step_count_;
    require_finite(params, "AdamW::step parameters");
}

}  // namespace flowpref::nn
