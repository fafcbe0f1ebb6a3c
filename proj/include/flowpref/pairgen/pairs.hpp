// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/scorer/scores.hpp"

namespace flowpref::pairgen {

enum class Origin { automatic, human };

std::string_view origin_name(Origin o);
Origin parse_origin(std::string_view name);

/// Winner/loser generations for one prompt. Human pairs always carry
/// score_c == 0. For automatic pairs the prompt and candidate indices are
/// kept so the selection can be audited.
struct PreferencePair {
    flow::Condition cond;
    Vec winner;
    Vec loser;
    scorer::ProbTriple p_w;
    scorer::ProbTriple p_l;
    double score_c = 0.0;
    Origin origin = Origin::automatic;
    std::size_t prompt_index = 0;
    std::size_t winner_index = 0;
    std::size_t loser_index = 0;

    bool operator==(const PreferencePair&) const = default;
};

struct PairSelection {
    std::size_t winner = 0;
    std::size_t loser = 0;

    bool operator==(const PairSelection&) const = default;
};

/// N guided samples for one prompt. Candidate i starts from noise seeded by
/// derive_seed(prompt_seed, {i}); callers derive prompt_seed from the base
/// seed and the prompt index. Throws InputError for N < 2.
std::vector<Vec> generate_candidates(const flow::VelocityModel& model, const flow::Condition& cond,
                                     std::size_t num_candidates, double gamma, std::size_t n_steps,
                                     std::uint64_t prompt_seed);

/// Winner = argmax p(Good), loser = argmax p(Bad), both breaking ties toward
/// the smallest index. Returns nullopt (prompt rejected) when they coincide.
/// Throws InputError on an empty list.
std::optional<PairSelection> select_pair(std::span<const scorer::ProbTriple> probs);

/// 0.5 * [(p_w.good - p_l.good) + (p_l.bad - p_w.bad)], in [-1, 1].
double complexity_score(const scorer::ProbTriple& p_w, const scorer::ProbTriple& p_l);

/// Drops automatic pairs with score_c < min_gap or any non-finite winner or
/// loser entry. Human pairs are always kept; order is preserved.
std::vector<PreferencePair> refilter(std::span<const PreferencePair> pairs, double min_gap);

}  // namespace flowpref::pairgen
