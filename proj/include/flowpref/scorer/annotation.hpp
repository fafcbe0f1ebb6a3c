// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/scorer/extractor.hpp"
#include "flowpref/scorer/head.hpp"

namespace flowpref::scorer {

/// Hidden ground-truth preference used to synthesize annotations:
///   U = w . (z1, z2, -z3, z4, z5)
/// where z are the scores standardized by `reference`. The desync score
/// enters negated because lower is better.
struct UtilityOracle {
    std::array<double, kNumScores> weights{1.0, 0.5, 1.0, 0.75, 0.5};
    ScoreNormalizer reference;
    /// Std of the Gaussian noise added per annotation.
    double noise_std = 0.05;

    double utility(const ScoreVector& s) const;
    double noisy_utility(const ScoreVector& s, Rng& rng) const;
};

/// Labels a pool by tertiles of noisy utility: the top third (by rank) is
/// Good, the middle third Medium, the rest Bad. Output order matches input.
std::vector<AnnotatedSample> annotate_by_tertiles(std::span<const ScoreVector> pool, const UtilityOracle& oracle,
                                                  Rng& rng);

struct PoolConfig {
    std::size_t num_prompts = 600;
    /// One sample per prompt per guidance scale.
    std::vector<double> gammas{1.0, 2.5, 4.5, 6.0};
    std::size_t n_steps = 50;
    double text_prob = 0.5;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

/// Scores of samples drawn from `model` for the annotation pool. Sample
/// (prompt i, gamma j) uses seed derive_seed(cfg.seed, {i, j}).
std::vector<ScoreVector> generate_score_pool(const flow::VelocityModel& model, const ScoreExtractor& extractor,
                                             const PoolConfig& cfg);

/// One JSON object per line: {"scores":[5 reals],"text":bool,"label":"Good"}.
void write_annotations(std::ostream& out, std::span<const AnnotatedSample> data);
std::vector<AnnotatedSample> read_annotations(std::istream& in);

}  // namespace flowpref::scorer
