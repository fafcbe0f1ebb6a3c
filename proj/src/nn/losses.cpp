// SPDX-License-Identifier: Apache-2.0
#include "flowpref/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::nn {

Vec softmax(std::span<const double> logits) {
    if (logits.empty()) {
        throw InputError("softmax: empty logits");
    }
    for (double z : logits) {
        if (!std::isfinite(z)) {
            throw InputError("softmax: non-finite logit");
        }
    }
    const double max = *std::max_element(logits.begin(), logits.end());
    Vec out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - max);
        sum += out[i];
    }
    for (double& p : out) {
        p /= sum;
    }
    return out;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
    if (label >= probs.size()) {
        throw InputError("cross_entropy: label " + std::to_string(label) + " out of range for " +
                         std::to_string(probs.size()) + " classes");
    }
    return -std::log(std::max(probs[label], kLogProbFloor));
}

Vec softmax_cross_entropy_grad(std::span<const double> probs, std::size_t label) {
    if (label >= probs.size()) {
        throw InputError("softmax_cross_entropy_grad: label out of range");
    }
    Vec g(probs.begin(), probs.end());
    g[label] -= 1.0;
    return g;
}

double softplus(double x) {
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace flowpref::nn
