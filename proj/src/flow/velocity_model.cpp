// SPDX-License-Identifier: Apache-2.0
#include "flowpref/flow/velocity_model.hpp"

#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::flow {

Vec condition_embedding(const Condition& cond, std::size_t num_classes) {
    Vec e(num_classes + 1, 0.0);
    if (cond.drop_flag) {
        e[num_classes] = 1.0;
        return e;
    }
    if (cond.class_id >= num_classes) {
        throw InputError("condition class id " + std::to_string(cond.class_id) + " out of range for " +
                         std::to_string(num_classes) + " classes");
    }
    e[cond.class_id] = 1.0;
    return e;
}

Vec null_embedding(std::size_t num_classes) {
    Condition dropped;
    dropped.drop_flag = true;
    return condition_embedding(dropped, num_classes);
}

VelocityModel::VelocityModel(std::size_t dim, std::size_t num_classes, double cond_drop_prob, nn::Mlp net)
    : dim_(dim), num_classes_(num_classes), cond_drop_prob_(cond_drop_prob), net_(std::move(net)) {
    if (dim_ == 0 || num_classes_ == 0) {
        throw InputError("VelocityModel: dim and num_classes must be positive");
    }
    if (!(cond_drop_prob_ >= 0.0 && cond_drop_prob_ <= 1.0)) {
        throw InputError("VelocityModel: cond_drop_prob must lie in [0, 1]");
    }
    if (net_.num_layers() == 0 || net_.input_dim() != dim_ + 1 + num_classes_ + 1 || net_.output_dim() != dim_) {
        throw InputError("VelocityModel: network shape does not match d=" + std::to_string(dim_) +
                         ", K=" + std::to_string(num_classes_));
    }
}

VelocityModel VelocityModel::initialize(std::size_t dim, std::size_t num_classes,
                                        const std::vector<std::size_t>& hidden, double cond_drop_prob,
                                        Rng& rng) {
    std::vector<std::size_t> dims;
    dims.push_back(dim + 1 + num_classes + 1);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(dim);
    return VelocityModel(dim, num_classes, cond_drop_prob, nn::Mlp::xavier_uniform(std::move(dims), rng));
}

Vec VelocityModel::null_embedding() const { return flow::null_embedding(num_classes_); }

Vec VelocityModel::network_input(std::span<const double> a_t, double t, const Condition& cond) const {
    if (a_t.size() != dim_) {
        throw InputError("VelocityModel: sample has length " + std::to_string(a_t.size()) + ", expected " +
                         std::to_string(dim_));
    }
    Vec in;
    in.reserve(net_.input_dim());
    in.insert(in.end(), a_t.begin(), a_t.end());
    in.push_back(t);
    const Vec e = condition_embedding(cond, num_classes_);
    in.insert(in.end(), e.begin(), e.end());
    return in;
}

Vec VelocityModel::velocity(std::span<const double> a_t, double t, const Condition& cond) const {
    return net_.forward(network_input(a_t, t, cond));
}

bool VelocityModel::same_architecture(const VelocityModel& other) const {
    return dim_ == other.dim_ && num_classes_ == other.num_classes_ &&
           net_.layer_dims() == other.net_.layer_dims();
}

}  // namespace flowpref::flow
