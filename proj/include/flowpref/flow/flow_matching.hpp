// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/toy_task.hpp"
#include "flowpref/flow/velocity_model.hpp"

namespace flowpref::flow {

/// Point on the straight path between data a0 (t = 0) and noise eps (t = 1).
struct FlowSample {
    Vec a0;
    Vec eps;
    double t = 0.0;
    /// (1 - t) a0 + t eps
    Vec a_t;
    /// d a_t / dt = eps - a0
    Vec v_target;
};

FlowSample interpolate(std::span<const double> a0, std::span<const double> eps, double t);

struct FlowExample {
    FlowSample sample;
    Condition cond;
};

/// Mean over the batch of ||v_target - u(a_t, t, cond)||^2. When `grad` is
/// non-empty it must have net().num_params() entries and receives the
/// gradient of that mean (accumulated, not overwritten).
double fm_loss(const VelocityModel& model, std::span<const FlowExample> batch, std::span<double> grad = {});

struct PretrainConfig {
    std::size_t steps = 4000;
    std::size_t batch_size = 64;
    std::vector<std::size_t> hidden{64, 64};
    double lr = 2e-3;
    std::size_t warmup_steps = 100;
    double weight_decay = 0.0;
    double cond_drop_prob = 0.1;
    std::size_t heldout_size = 512;
    /// Held-out loss above this fails the run.
    double loss_ceiling = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;
};

struct PretrainResult {
    VelocityModel model;
    double heldout_loss = 0.0;
    /// Loss of the zero-output model on the same held-out batch.
    double zero_baseline_loss = 0.0;
};

/// Draws a flow-matching batch: uniform class, target sample, N(0, I) noise,
/// t ~ U(0, 1), condition dropped with probability `cond_drop_prob`.
std::vector<FlowExample> draw_flow_batch(const ToyTask& task, std::size_t batch_size, double cond_drop_prob,
                                         Rng& rng);

/// Fits a velocity model to `task` with AdamW. Deterministic for a fixed
/// seed. Throws NumericError naming the step on divergence and
/// std::runtime_error when the held-out loss exceeds cfg.loss_ceiling.
PretrainResult pretrain(const ToyTask& task, const PretrainConfig& cfg);

}  // namespace flowpref::flow
