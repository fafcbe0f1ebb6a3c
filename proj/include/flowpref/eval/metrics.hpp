// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/scorer/extractor.hpp"
#include "flowpref/scorer/head.hpp"

namespace flowpref::eval {

/// 2 E||X - Y|| - E||X - X'|| - E||Y - Y'|| with all expectations taken as
/// plain means over every ordered pair (diagonal included), so identical
/// sets give exactly 0.
double energy_distance(std::span<const Vec> generated, std::span<const Vec> target);

struct SamplingSettings {
    double gamma = 4.5;
    std::size_t n_steps = 50;
    /// Prompt i is sampled from noise seeded by derive_seed(seed, {i}).
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

/// One guided sample per prompt.
std::vector<Vec> sample_prompts(const flow::VelocityModel& model, std::span<const flow::Condition> conds,
                                const SamplingSettings& settings);

struct GoodProb {
    double mean = 0.0;
    std::vector<double> per_prompt;
};

/// p(Good) of each sample under the head, and their mean.
GoodProb good_probs(std::span<const Vec> samples, std::span<const flow::Condition> conds,
                    const scorer::ScoreHead& head, const scorer::ScoreExtractor& extractor);

GoodProb mean_good_prob(const flow::VelocityModel& model, const scorer::ScoreHead& head,
                        const scorer::ScoreExtractor& extractor, std::span<const flow::Condition> conds,
                        const SamplingSettings& settings);

struct WinRate {
    double win_rate = 0.0;
    /// 1 when the policy's p(Good) is strictly higher, 0.5 on a tie, else 0.
    std::vector<double> outcomes;
    std::vector<double> policy_good;
    std::vector<double> reference_good;
};

/// Policy and reference share each prompt's starting noise.
WinRate win_rate(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                 const scorer::ScoreHead& head, const scorer::ScoreExtractor& extractor,
                 std::span<const flow::Condition> conds, const SamplingSettings& settings);

/// Outcomes and rate from already-scored per-prompt probabilities.
WinRate win_rate_from(std::span<const double> policy_good, std::span<const double> reference_good);

/// Percentile bootstrap of the mean: returns the (1 - confidence) quantile
/// of resampled means, i.e. a one-sided lower confidence bound.
double bootstrap_mean_lower_bound(std::span<const double> values, double confidence, std::size_t resamples,
                                  std::uint64_t seed);

}  // namespace flowpref::eval
