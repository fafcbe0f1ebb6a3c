// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "flowpref/pairgen/pairs.hpp"

namespace flowpref::dpo {

/// stage1 holds pairs with score_c strictly above the threshold, stage2 the
/// rest; both keep dataset order.
struct CurriculumSplit {
    std::vector<pairgen::PreferencePair> stage1;
    std::vector<pairgen::PreferencePair> stage2;
};

CurriculumSplit split_curriculum(std::span<const pairgen::PreferencePair> pairs, double score_delta);

}  // namespace flowpref::dpo
