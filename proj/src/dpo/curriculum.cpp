// SPDX-License-Identifier: Apache-2.0
#include "flowpref/dpo/curriculum.hpp"

namespace flowpref::dpo {

CurriculumSplit split_curriculum(std::span<const pairgen::PreferencePair> pairs, double score_delta) {
    CurriculumSplit split;
    for (const auto& p : pairs) {
        (p.score_c > score_delta ? split.stage1 : split.stage2).push_back(p);
    }
    return split;
}

}  // namespace flowpref::dpo
