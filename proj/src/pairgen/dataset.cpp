// SPDX-License-Identifier: Apache-2.0
#include "flowpref/pairgen/dataset.hpp"

#include <optional>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/parallel.hpp"
#include "flowpref/flow/model_io.hpp"
#include "flowpref/flow/sampler.hpp"

namespace flowpref::pairgen {

PairDataset build_dataset(const flow::VelocityModel& model, const scorer::ScoreHead& head,
                          const scorer::ScoreExtractor& extractor, std::span<const flow::Condition> conds,
                          const PairGenConfig& cfg, std::span<const PreferencePair> human_pairs) {
    if (cfg.num_candidates < 2) {
        throw InputError("build_dataset: num_candidates must be at least 2");
    }
    std::vector<std::optional<PreferencePair>> slots(conds.size());
    parallel_for(conds.size(), cfg.threads, [&](std::size_t i) {
        const auto& cond = conds[i];
        const auto candidates = generate_candidates(model, cond, cfg.num_candidates, cfg.gamma, cfg.n_steps,
                                                    derive_seed(cfg.seed, {i}));
        std::vector<scorer::ProbTriple> probs;
        probs.reserve(candidates.size());
        for (const auto& x : candidates) {
            probs.push_back(scorer::score_probs(head, extractor.extract(x, cond)));
        }
        const auto sel = select_pair(probs);
        if (!sel) {
            return;
        }
        PreferencePair p;
        p.cond = cond;
        p.cond.drop_flag = false;
        p.winner = candidates[sel->winner];
        p.loser = candidates[sel->loser];
        p.p_w = probs[sel->winner];
        p.p_l = probs[sel->loser];
        p.score_c = complexity_score(p.p_w, p.p_l);
        p.origin = Origin::automatic;
        p.prompt_index = i;
        p.winner_index = sel->winner;
        p.loser_index = sel->loser;
        slots[i] = std::move(p);
    });

    PairDataset ds;
    std::vector<PreferencePair> selected;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            selected.push_back(std::move(*slots[i]));
        } else {
            ds.rejected.push_back(i);
        }
    }
    ds.pairs = refilter(selected, cfg.min_gap);
    ds.header.filtered_pairs = selected.size() - ds.pairs.size();
    ds.header.auto_pairs = ds.pairs.size();
    for (const auto& h : human_pairs) {
        PreferencePair p = h;
        p.origin = Origin::human;
        p.score_c = 0.0;
        ds.pairs.push_back(std::move(p));
    }

    ds.header.model_id = flow::checkpoint_id(model);
    ds.header.head_id = scorer::head_checkpoint_id(head);
    ds.header.extractor = std::string(extractor.name());
    ds.header.num_candidates = cfg.num_candidates;
    ds.header.gamma = cfg.gamma;
    ds.header.n_steps = cfg.n_steps;
    ds.header.seed = cfg.seed;
    ds.header.min_gap = cfg.min_gap;
    ds.header.num_prompts = conds.size();
    ds.header.rejected_prompts = ds.rejected.size();
    ds.header.human_pairs = human_pairs.size();
    return ds;
}

std::vector<PreferencePair> synthesize_human_pairs(const flow::VelocityModel& model,
                                                   const scorer::ScoreHead& head,
                                                   const scorer::ScoreExtractor& extractor,
                                                   const scorer::UtilityOracle& oracle,
                                                   std::span<const flow::Condition> conds, double gamma,
                                                   std::size_t n_steps, std::uint64_t seed, std::size_t threads) {
    std::vector<PreferencePair> out(conds.size());
    parallel_for(conds.size(), threads, [&](std::size_t i) {
        const auto& cond = conds[i];
        const auto candidates = generate_candidates(model, cond, 2, gamma, n_steps, derive_seed(seed, {i}));
        Rng judge(derive_seed(seed, {i, 2}));
        std::array<scorer::ScoreVector, 2> scores{extractor.extract(candidates[0], cond),
                                                  extractor.extract(candidates[1], cond)};
        const double u0 = oracle.noisy_utility(scores[0], judge);
        const double u1 = oracle.noisy_utility(scores[1], judge);
        const std::size_t w = u1 > u0 ? 1 : 0;
        const std::size_t l = 1 - w;
        PreferencePair& p = out[i];
        p.cond = cond;
        p.cond.drop_flag = false;
        p.winner = candidates[w];
        p.loser = candidates[l];
        p.p_w = scorer::score_probs(head, scores[w]);
        p.p_l = scorer::score_probs(head, scores[l]);
        p.score_c = 0.0;
        p.origin = Origin::human;
        p.prompt_index = i;
        p.winner_index = w;
        p.loser_index = l;
    });
    return out;
}

}  // namespace flowpref::pairgen
