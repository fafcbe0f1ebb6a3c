// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "flowpref/common/rng.hpp"

namespace flowpref::flow {

/// Generation prompt: a class id plus an optional text channel. `drop_flag`
/// marks a condition dropped for classifier-free guidance.
struct Condition {
    std::size_t class_id = 0;
    bool text_present = false;
    bool drop_flag = false;

    bool operator==(const Condition&) const = default;
};

/// One-hot embedding of length num_classes + 1. Slot num_classes is the
/// dedicated null condition used whenever drop_flag is set; its first-layer
/// weights are trained like any other, which makes it a learned null
/// embedding.
Vec condition_embedding(const Condition& cond, std::size_t num_classes);
Vec null_embedding(std::size_t num_classes);

}  // namespace flowpref::flow

#include <cstdint>
#include <vector>

namespace flowpref::flow {

/// n prompts with uniformly drawn class ids; each carries text with
/// probability `text_prob`. Prompt i depends only on (seed, i).
std::vector<Condition> draw_conditions(std::size_t num_classes, std::size_t n, double text_prob,
                                       std::uint64_t seed);

}  // namespace flowpref::flow
