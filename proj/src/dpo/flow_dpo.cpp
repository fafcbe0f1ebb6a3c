// SPDX-License-Identifier: Apache-2.0
#include "flowpref/dpo/flow_dpo.hpp"

#include "flowpref/common/errors.hpp"
#include "flowpref/flow/flow_matching.hpp"
#include "flowpref/nn/losses.hpp"

namespace flowpref::dpo {

PairNoise draw_pair_noise(std::size_t dim, Rng& rng) {
    PairNoise n;
    n.t = uniform01(rng);
    n.eps_w = standard_normal(rng, dim);
    n.eps_l = standard_normal(rng, dim);
    return n;
}

namespace {

struct SideEval {
    nn::ForwardTrace trace;
    Vec v_target;
    double policy_err = 0.0;
    double reference_err = 0.0;
};

SideEval eval_side(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                   std::span<const double> a0, std::span<const double> eps, double t, const flow::Condition& cond) {
    const auto s = flow::interpolate(a0, eps, t);
    const Vec input = policy.network_input(s.a_t, t, cond);
    SideEval out;
    out.trace = policy.net().forward_trace(input);
    out.v_target = s.v_target;
    out.policy_err = flow::squared_distance(s.v_target, out.trace.output());
    out.reference_err = flow::squared_distance(s.v_target, reference.net().forward(input));
    return out;
}

void backprop_side(const flow::VelocityModel& policy, const SideEval& side, double scale, std::span<double> grad) {
    // d(scale * ||v - u||^2)/du = -2 scale (v - u)
    const Vec& u = side.trace.output();
    Vec upstream(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        upstream[i] = -2.0 * scale * (side.v_target[i] - u[i]);
    }
    policy.net().backward(side.trace, upstream, grad);
}

}  // namespace

DpoLossTerms flow_dpo_loss(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                           std::span<const pairgen::PreferencePair> pairs, std::span<const PairNoise> noise,
                           double beta, std::span<double> grad) {
    if (!policy.same_architecture(reference)) {
        throw InputError("flow_dpo_loss: policy and reference architectures differ");
    }
    if (pairs.empty() || pairs.size() != noise.size()) {
        throw InputError("flow_dpo_loss: need a non-empty batch with one noise draw per pair");
    }
    const bool want_grad = !grad.empty();
    if (want_grad && grad.size() != policy.net().num_params()) {
        throw InputError("flow_dpo_loss: gradient buffer has the wrong size");
    }
    const double inv_n = 1.0 / static_cast<double>(pairs.size());
    DpoLossTerms terms;
    terms.args.reserve(pairs.size());
    for (std::size_t b = 0; b < pairs.size(); ++b) {
        const auto& pair = pairs[b];
        const auto& nz = noise[b];
        flow::Condition cond = pair.cond;
        cond.drop_flag = false;
        const SideEval w = eval_side(policy, reference, pair.winner, nz.eps_w, nz.t, cond);
        const SideEval l = eval_side(policy, reference, pair.loser, nz.eps_l, nz.t, cond);
        const double diff = (w.policy_err - w.reference_err) - (l.policy_err - l.reference_err);
        const double arg = -0.5 * beta * diff;
        terms.args.push_back(arg);
        terms.loss += nn::softplus(-arg) * inv_n;
        terms.mean_arg += arg * inv_n;
        if (want_grad) {
            // d softplus(-arg)/d arg = -sigmoid(-arg); d arg/d E_pol^w = -beta/2.
            const double coeff = 0.5 * beta * nn::sigmoid(-arg) * inv_n;
            backprop_side(policy, w, coeff, grad);
            backprop_side(policy, l, -coeff, grad);
        }
    }
    return terms;
}

}  // namespace flowpref::dpo
