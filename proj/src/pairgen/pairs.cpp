// SPDX-License-Identifier: Apache-2.0
#include "flowpref/pairgen/pairs.hpp"

#include <cmath>

#include "flowpref/common/errors.hpp"
#include "flowpref/flow/sampler.hpp"

namespace flowpref::pairgen {

std::string_view origin_name(Origin o) { return o == Origin::human ? "human" : "auto"; }

Origin parse_origin(std::string_view name) {
    if (name == "auto") {
        return Origin::automatic;
    }
    if (name == "human") {
        return Origin::human;
    }
    throw InputError("unknown pair origin '" + std::string(name) + "'");
}

std::vector<Vec> generate_candidates(const flow::VelocityModel& model, const flow::Condition& cond,
                                     std::size_t num_candidates, double gamma, std::size_t n_steps,
                                     std::uint64_t prompt_seed) {
    if (num_candidates < 2) {
        throw InputError("generate_candidates: need at least 2 candidates to form a pair");
    }
    std::vector<Vec> out;
    out.reserve(num_candidates);
    for (std::size_t i = 0; i < num_candidates; ++i) {
        Rng rng(derive_seed(prompt_seed, {i}));
        out.push_back(flow::sample(model, cond, gamma, n_steps, rng));
    }
    return out;
}

std::optional<PairSelection> select_pair(std::span<const scorer::ProbTriple> probs) {
    if (probs.empty()) {
        throw InputError("select_pair: no candidates");
    }
    PairSelection sel;
    for (std::size_t k = 1; k < probs.size(); ++k) {
        if (probs[k].good > probs[sel.winner].good) {
            sel.winner = k;
        }
        if (probs[k].bad > probs[sel.loser].bad) {
            sel.loser = k;
        }
    }
    if (sel.winner == sel.loser) {
        return std::nullopt;
    }
    return sel;
}

double complexity_score(const scorer::ProbTriple& p_w, const scorer::ProbTriple& p_l) {
    return 0.5 * ((p_w.good - p_l.good) + (p_l.bad - p_w.bad));
}

namespace {

bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<PreferencePair> refilter(std::span<const PreferencePair> pairs, double min_gap) {
    if (!(min_gap >= 0.0)) {
        throw InputError("refilter: min_gap must be non-negative");
    }
    std::vector<PreferencePair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (p.origin == Origin::human ||
            (p.score_c >= min_gap && all_finite(p.winner) && all_finite(p.loser))) {
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace flowpref::pairgen
