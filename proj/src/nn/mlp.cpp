// SPDX-License-Identifier: Apache-2.0
#include "flowpref/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::nn {

Mlp::Mlp(std::vector<std::size_t> layer_dims) : dims_(std::move(layer_dims)) {
    if (dims_.size() < 2) {
        throw InputError("Mlp needs at least an input and an output dimension");
    }
    std::size_t total = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (dims_[k] == 0) {
            throw InputError("Mlp layer dimensions must be positive");
        }
        if (k + 1 < dims_.size()) {
            offsets_.push_back(total);
            total += dims_[k] * dims_[k + 1] + dims_[k + 1];
        }
    }
    params_.assign(total, 0.0);
}

Mlp Mlp::xavier_uniform(std::vector<std::size_t> layer_dims, Rng& rng) {
    Mlp net(std::move(layer_dims));
    for (std::size_t k = 0; k < net.num_layers(); ++k) {
        const double fan_in = static_cast<double>(net.dims_[k]);
        const double fan_out = static_cast<double>(net.dims_[k + 1]);
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : net.weights(k)) {
            w = dist(rng);
        }
    }
    return net;
}

std::span<double> Mlp::weights(std::size_t layer) {
    return std::span<double>(params_).subspan(weight_offset(layer), dims_[layer] * dims_[layer + 1]);
}

std::span<const double> Mlp::weights(std::size_t layer) const {
    return std::span<const double>(params_).subspan(weight_offset(layer), dims_[layer] * dims_[layer + 1]);
}

std::span<double> Mlp::biases(std::size_t layer) {
    return std::span<double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}

std::span<const double> Mlp::biases(std::size_t layer) const {
    return std::span<const double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}

namespace {

void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x, Vec& out) {
    const std::size_t rows = b.size();
    const std::size_t cols = x.size();
    out.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = w.data() + r * cols;
        double acc = b[r];
        for (std::size_t c = 0; c < cols; ++c) {
            acc += row[c] * x[c];
        }
        out[r] = acc;
    }
}

}  // namespace

Vec Mlp::forward(std::span<const double> x) const {
    if (x.size() != input_dim()) {
        throw InputError("Mlp::forward: input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(input_dim()));
    }
    Vec current(x.begin(), x.end());
    Vec next;
    for (std::size_t k = 0; k < num_layers(); ++k) {
        affine(weights(k), biases(k), current, next);
        if (k + 1 < num_layers()) {
            for (double& v : next) {
                v = v > 0.0 ? v : 0.0;
            }
        }
        current.swap(next);
    }
    return current;
}

ForwardTrace Mlp::forward_trace(std::span<const double> x) const {
    if (x.size() != input_dim()) {
        throw InputError("Mlp::forward_trace: input has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(input_dim()));
    }
    ForwardTrace trace;
    trace.inputs.reserve(num_layers());
    trace.preacts.resize(num_layers());
    trace.inputs.emplace_back(x.begin(), x.end());
    for (std::size_t k = 0; k < num_layers(); ++k) {
        affine(weights(k), biases(k), trace.inputs[k], trace.preacts[k]);
        if (k + 1 < num_layers()) {
            Vec act = trace.preacts[k];
            for (double& v : act) {
                v = v > 0.0 ? v : 0.0;
            }
            trace.inputs.push_back(std::move(act));
        }
    }
    return trace;
}

Vec Mlp::backward(const ForwardTrace& trace, std::span<const double> upstream,
                  std::span<double> param_grad) const {
    if (upstream.size() != output_dim()) {
        throw InputError("Mlp::backward: upstream gradient has length " + std::to_string(upstream.size()) +
                         ", expected " + std::to_string(output_dim()));
    }
    if (param_grad.size() != num_params()) {
        throw InputError("Mlp::backward: parameter gradient buffer has the wrong size");
    }
    if (trace.inputs.size() != num_layers() || trace.preacts.size() != num_layers()) {
        throw InputError("Mlp::backward: trace does not belong to this network");
    }

    Vec delta(upstream.begin(), upstream.end());
    Vec prev;
    for (std::size_t k = num_layers(); k-- > 0;) {
        const Vec& in = trace.inputs[k];
        const std::size_t rows = dims_[k + 1];
        const std::size_t cols = dims_[k];
        double* gw = param_grad.data() + weight_offset(k);
        double* gb = param_grad.data() + bias_offset(k);
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = delta[r];
            gb[r] += d;
            if (d == 0.0) {
                continue;
            }
            double* grow = gw + r * cols;
            for (std::size_t c = 0; c < cols; ++c) {
                grow[c] += d * in[c];
            }
        }
        prev.assign(cols, 0.0);
        const auto w = weights(k);
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = delta[r];
            if (d == 0.0) {
                continue;
            }
            const double* row = w.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) {
                prev[c] += row[c] * d;
            }
        }
        if (k > 0) {
            const Vec& z = trace.preacts[k - 1];
            for (std::size_t c = 0; c < cols; ++c) {
                if (!(z[c] > 0.0)) {
                    prev[c] = 0.0;
                }
            }
        }
        delta.swap(prev);
    }
    return delta;
}

void Mlp::check_finite() const { require_finite(params_, "Mlp parameters"); }

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NumericError(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

}  // namespace flowpref::nn
