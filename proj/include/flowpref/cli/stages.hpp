// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "flowpref/cli/config.hpp"
#include "flowpref/eval/report.hpp"

namespace flowpref::cli {

/// Artifact layout under cfg.out, one directory per stage:
///   pretrain/model.txt
///   scorer/annotations.jsonl, scorer/head.txt
///   pairs/pairs.jsonl
///   dpo/policy.txt, dpo/training_log.jsonl
///   eval/report.json
/// Every stage directory also holds manifest.json. Artifacts carry no
/// timestamps or absolute paths, so identical configs give identical trees.
struct RunContext {
    RunConfig cfg;
    /// Recorded verbatim in every manifest.
    std::vector<std::string> overrides;
    std::ostream* log = nullptr;
};

std::string artifact_path(const RunConfig& cfg, std::string_view stage, std::string_view file);

void run_pretrain(const RunContext& ctx);
void run_train_scorer(const RunContext& ctx);
void run_gen_pairs(const RunContext& ctx);
void run_dpo_train(const RunContext& ctx);
eval::EvalReport run_eval(const RunContext& ctx);
/// The five stages above, in order.
eval::EvalReport run_pipeline(const RunContext& ctx);

}  // namespace flowpref::cli
