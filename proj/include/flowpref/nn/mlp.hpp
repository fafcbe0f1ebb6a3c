// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flowpref/common/rng.hpp"

namespace flowpref::nn {

/// Intermediate values of one forward pass, kept for backward().
struct ForwardTrace {
    /// inputs[k] is the input of affine layer k (inputs[0] is x).
    std::vector<Vec> inputs;
    /// preacts[k] = W_k inputs[k] + b_k.
    std::vector<Vec> preacts;

    const Vec& output() const { return preacts.back(); }
};

/// Dense multilayer perceptron: ReLU on hidden layers, identity on the output.
///
/// All parameters live in one flat buffer. Layer k contributes its weight
/// matrix (layer_dims[k+1] x layer_dims[k], row-major) followed by its bias
/// vector, so optimizers and gradient checks can treat the net as a single
/// parameter vector.
class Mlp {
public:
    Mlp() = default;
    /// Zero-initialized network. Needs at least two dims, all positive.
    explicit Mlp(std::vector<std::size_t> layer_dims);

    /// Uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, zero biases.
    static Mlp xavier_uniform(std::vector<std::size_t> layer_dims, Rng& rng);

    const std::vector<std::size_t>& layer_dims() const noexcept { return dims_; }
    std::size_t num_layers() const noexcept { return dims_.empty() ? 0 : dims_.size() - 1; }
    std::size_t input_dim() const noexcept { return dims_.front(); }
    std::size_t output_dim() const noexcept { return dims_.back(); }
    std::size_t num_params() const noexcept { return params_.size(); }

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }

    std::span<double> weights(std::size_t layer);
    std::span<const double> weights(std::size_t layer) const;
    std::span<double> biases(std::size_t layer);
    std::span<const double> biases(std::size_t layer) const;

    /// Offsets of layer k's weights/biases inside params().
    std::size_t weight_offset(std::size_t layer) const { return offsets_.at(layer); }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_.at(layer) + dims_[layer] * dims_[layer + 1];
    }

    Vec forward(std::span<const double> x) const;
    ForwardTrace forward_trace(std::span<const double> x) const;

    /// Accumulates d(loss)/d(params) into `param_grad` given d(loss)/d(output),
    /// and returns d(loss)/d(input). ReLU'(0) is taken as 0.
    Vec backward(const ForwardTrace& trace, std::span<const double> upstream,
                 std::span<double> param_grad) const;

    /// Throws NumericError if any parameter is NaN or Inf.
    void check_finite() const;

    bool operator==(const Mlp&) const = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> offsets_;
    Vec params_;
};

/// Throws NumericError naming `what` if any entry is not finite.
void require_finite(std::span<const double> values, const char* what);

}  // namespace flowpref::nn
