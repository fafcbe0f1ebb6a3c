// SPDX-License-Identifier: Apache-2.0
#include "flowpref/flow/condition.hpp"

#include "flowpref/common/errors.hpp"

namespace flowpref::flow {

std::vector<Condition> draw_conditions(std::size_t num_classes, std::size_t n, double text_prob,
                                       std::uint64_t seed) {
    if (num_classes == 0) {
        throw InputError("draw_conditions: num_classes must be positive");
    }
    std::vector<Condition> out(n);
    std::uniform_int_distribution<std::size_t> pick(0, num_classes - 1);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, {i}));
        out[i].class_id = pick(rng);
        out[i].text_present = uniform01(rng) < text_prob;
    }
    return out;
}

}  // namespace flowpref::flow
