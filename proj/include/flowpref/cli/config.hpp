// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowpref/dpo/trainer.hpp"
#include "flowpref/flow/flow_matching.hpp"
#include "flowpref/flow/toy_task.hpp"
#include "flowpref/pairgen/dataset.hpp"
#include "flowpref/scorer/annotation.hpp"
#include "flowpref/scorer/extractor.hpp"
#include "flowpref/scorer/head.hpp"

namespace flowpref::cli {

struct ScorerSection {
    std::string extractor = "toy";
    scorer::ToyExtractorParams extractor_params;
    scorer::PoolConfig pool;
    double annotation_noise = 0.05;
    scorer::HeadTrainConfig head;
};

struct PairsSection {
    pairgen::PairGenConfig gen;
    std::size_t num_prompts = 1000;
    double text_prob = 0.5;
    /// Empty: synthesize `human_prompts` pairs from the utility oracle.
    std::string human_pairs;
    std::size_t human_prompts = 100;
};

struct EvalSection {
    std::size_t num_prompts = 500;
    double gamma = 4.5;
    std::size_t n_steps = 50;
    double text_prob = 0.5;
};

/// Stage seeds are not read from the file; derive_stage_seeds() fills them
/// from the global seed.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string out = "runs/default";
    std::size_t threads = 1;
    flow::ToyTaskSpec task;
    flow::PretrainConfig pretrain;
    ScorerSection scorer;
    PairsSection pairs;
    dpo::DpoConfig dpo;
    EvalSection eval;
};

/// Per-stage seeds, all functions of the global seed.
struct StageSeeds {
    std::uint64_t pretrain = 0;
    std::uint64_t pool = 0;
    std::uint64_t annotate = 0;
    std::uint64_t head = 0;
    std::uint64_t pair_prompts = 0;
    std::uint64_t pairs = 0;
    std::uint64_t human_prompts = 0;
    std::uint64_t human = 0;
    std::uint64_t dpo = 0;
    std::uint64_t eval_prompts = 0;
    std::uint64_t eval = 0;
};

StageSeeds stage_seeds(std::uint64_t global_seed);

/// Copies stage_seeds(cfg.seed) into every section's seed field.
void derive_stage_seeds(RunConfig& cfg);

/// Strict: unknown keys at any level, wrong types and out-of-range values
/// throw ConfigError naming every offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    std::optional<double> beta;
    std::optional<double> score_delta;
    std::optional<std::size_t> num_candidates;
    std::optional<double> gamma;
    std::optional<double> min_gap;
    std::optional<std::string> human_pairs;
};

/// Applies set overrides, re-derives stage seeds and re-validates. Returns
/// "key=value" strings for the manifest, in a fixed order.
std::vector<std::string> apply_overrides(RunConfig& cfg, const Overrides& ov);

/// Throws ConfigError listing every invalid field.
void validate(const RunConfig& cfg);

}  // namespace flowpref::cli
