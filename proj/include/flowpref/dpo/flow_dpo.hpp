// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/pairgen/pairs.hpp"

namespace flowpref::dpo {

/// Noise for one pair: a shared timestep and an independent eps per side.
struct PairNoise {
    double t = 0.0;
    Vec eps_w;
    Vec eps_l;
};

PairNoise draw_pair_noise(std::size_t dim, Rng& rng);

struct DpoLossTerms {
    /// Mean over pairs of -log sigmoid(arg).
    double loss = 0.0;
    /// Mean of the pre-sigmoid arguments.
    double mean_arg = 0.0;
    /// arg_b = -(beta/2) [(E_pol^w - E_ref^w) - (E_pol^l - E_ref^l)], with
    /// E_m^s = ||v^s - u_m(a_t^s, t)||^2 on the interpolant of side s.
    std::vector<double> args;
};

/// Flow-DPO loss of `policy` against the frozen `reference` over a batch of
/// pairs with matching noise draws. When `grad` is non-empty it receives the
/// gradient of the mean loss w.r.t. the policy parameters (accumulated).
/// Throws InputError when the two models differ in architecture or the
/// batch and noise lengths disagree.
DpoLossTerms flow_dpo_loss(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                           std::span<const pairgen::PreferencePair> pairs, std::span<const PairNoise> noise,
                           double beta, std::span<double> grad = {});

}  // namespace flowpref::dpo
