// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

#include "flowpref/common/rng.hpp"

namespace flowpref::nn {

struct AdamWConfig {
    double base_lr = 1e-3;
    std::size_t warmup_steps = 0;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// base_lr * min(1, step / warmup_steps); base_lr when warmup_steps == 0.
double warmup_lr(double base_lr, std::size_t warmup_steps, std::size_t step);

/// AdamW with decoupled weight decay and a linear warmup schedule.
///
/// Step s (0-based, the value of step_count() before the update) uses the
/// learning rate warmup_lr(base_lr, warmup_steps, s), so the very first
/// update under a non-zero warmup moves nothing. Bias correction uses s + 1.
class AdamW {
public:
    AdamW(std::size_t num_params, AdamWConfig config);

    /// Applies one update in place. Gradients are checked first: a NaN or Inf
    /// throws NumericError and leaves params and state untouched.
    void step(std::span<double> params, std::span<const double> grads);

    /// Learning rate the next step() will use.
    double current_lr() const;
    std::size_t step_count() const noexcept { return step_count_; }
    const AdamWConfig& config() const noexcept { return config_; }
    std::span<const double> first_moment() const noexcept { return m_; }
    std::span<const double> second_moment() const noexcept { return v_; }

private:
    AdamWConfig config_;
    std::size_t step_count_ = 0;
    Vec m_;
    Vec v_;
};

}  // namespace flowpref::nn
