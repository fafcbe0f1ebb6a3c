// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/nn/mlp.hpp"

namespace flowpref::flow {

/// Vector field u(a_t, t, cond). The network input is the concatenation
/// [a_t, t, condition_embedding(cond)], the output a d-vector.
class VelocityModel {
public:
    VelocityModel(std::size_t dim, std::size_t num_classes, double cond_drop_prob, nn::Mlp net);

    /// Fresh model with Xavier-initialized hidden layers of the given widths.
    static VelocityModel initialize(std::size_t dim, std::size_t num_classes,
                                    const std::vector<std::size_t>& hidden, double cond_drop_prob, Rng& rng);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    double cond_drop_prob() const noexcept { return cond_drop_prob_; }
    Vec null_embedding() const;

    const nn::Mlp& net() const noexcept { return net_; }
    nn::Mlp& net() noexcept { return net_; }

    Vec network_input(std::span<const double> a_t, double t, const Condition& cond) const;
    Vec velocity(std::span<const double> a_t, double t, const Condition& cond) const;

    /// True when both models have identical layer dims, d and K.
    bool same_architecture(const VelocityModel& other) const;

    bool operator==(const VelocityModel&) const = default;

private:
    std::size_t dim_;
    std::size_t num_classes_;
    double cond_drop_prob_;
    nn::Mlp net_;
};

}  // namespace flowpref::flow
