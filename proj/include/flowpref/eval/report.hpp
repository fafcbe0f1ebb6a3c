// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "flowpref/eval/metrics.hpp"
#include "flowpref/flow/toy_task.hpp"

namespace flowpref::eval {

struct EvalReport {
    // Provenance.
    std::string policy_id;
    std::string reference_id;
    std::string head_id;
    std::uint64_t eval_seed = 0;
    std::uint64_t prompt_seed = 0;
    double gamma = 4.5;
    std::size_t n_steps = 50;
    std::size_t n_prompts = 0;

    // Metrics.
    double energy_distance = 0.0;
    double mean_good_prob_policy = 0.0;
    double mean_good_prob_reference = 0.0;
    double win_rate = 0.0;
    /// Mean of per-prompt p(Good) differences (policy - reference).
    double good_prob_margin = 0.0;
    /// One-sided 95% bootstrap lower bound of that margin.
    double margin_lower_95 = 0.0;

    bool operator==(const EvalReport&) const = default;
};

/// Samples one output per prompt from each model with shared noise, scores
/// them, and measures the policy's energy distance to fresh target samples
/// (target for prompt i drawn with derive_seed(seed, {i, 1})).
EvalReport evaluate(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                    const scorer::ScoreHead& head, const scorer::ScoreExtractor& extractor,
                    const flow::ToyTask& task, std::span<const flow::Condition> conds,
                    const SamplingSettings& settings, std::uint64_t prompt_seed = 0);

/// Pretty-printed JSON object.
void write_report(std::ostream& out, const EvalReport& report);
EvalReport read_report(std::istream& in);

/// Fixed-order, human-readable table of the metrics.
std::string summary_table(const EvalReport& report);

}  // namespace flowpref::eval
