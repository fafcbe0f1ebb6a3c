// SPDX-License-Identifier: Apache-2.0
#include "flowpref/flow/flow_matching.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flowpref/common/errors.hpp"
#include "flowpref/nn/adamw.hpp"

namespace flowpref::flow {

FlowSample interpolate(std::span<const double> a0, std::span<const double> eps, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw InputError("interpolate: t must lie in [0, 1]");
    }
    if (a0.size() != eps.size()) {
        throw InputError("interpolate: a0 and eps differ in length");
    }
    FlowSample s;
    s.a0.assign(a0.begin(), a0.end());
    s.eps.assign(eps.begin(), eps.end());
    s.t = t;
    s.a_t.resize(a0.size());
    s.v_target.resize(a0.size());
    for (std::size_t i = 0; i < a0.size(); ++i) {
        s.a_t[i] = (1.0 - t) * a0[i] + t * eps[i];
        s.v_target[i] = eps[i] - a0[i];
    }
    // Exact endpoints regardless of rounding in the blend above.
    if (t == 0.0) {
        s.a_t = s.a0;
    } else if (t == 1.0) {
        s.a_t = s.eps;
    }
    return s;
}

double fm_loss(const VelocityModel& model, std::span<const FlowExample> batch, std::span<double> grad) {
    if (batch.empty()) {
        throw InputError("fm_loss: empty batch");
    }
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != model.net().num_params()) {
        throw InputError("fm_loss: gradient buffer has the wrong size");
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    Vec upstream(model.dim());
    for (const auto& ex : batch) {
        const Vec input = model.network_input(ex.sample.a_t, ex.sample.t, ex.cond);
        const auto& v = ex.sample.v_target;
        if (!want_grad) {
            const Vec u = model.net().forward(input);
            total += squared_distance(v, u);
            continue;
        }
        const auto trace = model.net().forward_trace(input);
        const Vec& u = trace.output();
        total += squared_distance(v, u);
        for (std::size_t i = 0; i < u.size(); ++i) {
            upstream[i] = -2.0 * (v[i] - u[i]) * inv_n;
        }
        model.net().backward(trace, upstream, grad);
    }
    return total * inv_n;
}

std::vector<FlowExample> draw_flow_batch(const ToyTask& task, std::size_t batch_size, double cond_drop_prob,
                                         Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick_class(0, task.num_classes() - 1);
    std::vector<FlowExample> batch;
    batch.reserve(batch_size);
    for (std::size_t b = 0; b < batch_size; ++b) {
        FlowExample ex;
        ex.cond.class_id = pick_class(rng);
        const Vec a0 = task.sample(ex.cond.class_id, rng);
        const Vec eps = standard_normal(rng, task.dim());
        const double t = uniform01(rng);
        ex.cond.drop_flag = uniform01(rng) < cond_drop_prob;
        ex.sample = interpolate(a0, eps, t);
        batch.push_back(std::move(ex));
    }
    return batch;
}

PretrainResult pretrain(const ToyTask& task, const PretrainConfig& cfg) {
    if (cfg.batch_size == 0 || cfg.heldout_size == 0) {
        throw InputError("pretrain: batch_size and heldout_size must be positive");
    }
    Rng init_rng(derive_seed(cfg.seed, {0}));
    VelocityModel model =
        VelocityModel::initialize(task.dim(), task.num_classes(), cfg.hidden, cfg.cond_drop_prob, init_rng);

    Rng data_rng(derive_seed(cfg.seed, {1}));
    nn::AdamW opt(model.net().num_params(),
                  nn::AdamWConfig{.base_lr = cfg.lr, .warmup_steps = cfg.warmup_steps,
                                  .weight_decay = cfg.weight_decay});
    Vec grad(model.net().num_params());
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const auto batch = draw_flow_batch(task, cfg.batch_size, cfg.cond_drop_prob, data_rng);
        std::fill(grad.begin(), grad.end(), 0.0);
        const double loss = fm_loss(model, batch, grad);
        if (!std::isfinite(loss)) {
            throw NumericError("pretrain: loss became non-finite at step " + std::to_string(step));
        }
        try {
            opt.step(model.net().params(), grad);
        } catch (const NumericError& e) {
            throw NumericError("pretrain: step " + std::to_string(step) + ": " + e.what());
        }
    }

    Rng heldout_rng(derive_seed(cfg.seed, {2}));
    const auto heldout = draw_flow_batch(task, cfg.heldout_size, 0.0, heldout_rng);
    PretrainResult result{model, fm_loss(model, heldout), 0.0};
    for (const auto& ex : heldout) {
        double n2 = 0.0;
        for (double v : ex.sample.v_target) {
            n2 += v * v;
        }
        result.zero_baseline_loss += n2;
    }
    result.zero_baseline_loss /= static_cast<double>(heldout.size());
    if (result.heldout_loss > cfg.loss_ceiling) {
        throw std::runtime_error("pretrain: held-out loss " + std::to_string(result.heldout_loss) +
                                 " exceeds the ceiling " + std::to_string(cfg.loss_ceiling));
    }
    return result;
}

}  // namespace flowpref::flow
