// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/pairgen/pairs.hpp"

namespace flowpref::dpo {

struct DpoConfig {
    double beta = 600.0;
    double score_delta = 0.7;
    std::size_t stage1_steps = 6000;
    std::size_t stage2_steps = 6000;
    std::size_t batch_size = 8;
    double lr = 5e-6;
    std::size_t warmup_steps = 1000;
    double weight_decay = 0.0;
    std::uint64_t seed = 1;
};

/// One record per optimizer step. `stage` is 1 or 2 for curriculum runs and
/// 0 for a single-stage run.
struct DpoLogEntry {
    std::size_t step = 0;
    int stage = 0;
    double loss = 0.0;
    double mean_arg = 0.0;
    double lr = 0.0;

    bool operator==(const DpoLogEntry&) const = default;
};

struct StageSummary {
    int stage = 0;
    std::size_t pairs = 0;
    std::size_t steps = 0;
    bool skipped = false;

    bool operator==(const StageSummary&) const = default;
};

struct DpoResult {
    flow::VelocityModel policy;
    std::vector<DpoLogEntry> log;
    std::vector<StageSummary> stages;
};

/// Curriculum DPO: stage 1 on pairs with score_c > score_delta, then stage 2
/// on the rest, against a frozen copy of `policy_init`. The optimizer and
/// warmup restart at each stage. An empty stage is skipped and its step
/// budget goes to the other stage, so the total number of updates is always
/// stage1_steps + stage2_steps. The k-th executed stage draws batches and
/// noise from derive_seed(seed, {k}).
/// Throws InputError on an empty dataset, NumericError with the step on a
/// non-finite loss.
DpoResult dpo_train(const flow::VelocityModel& policy_init, std::span<const pairgen::PreferencePair> pairs,
                    const DpoConfig& cfg);

/// Regular DPO: one stage over all pairs in shuffled order for
/// stage1_steps + stage2_steps updates.
DpoResult dpo_train_single_stage(const flow::VelocityModel& policy_init,
                                 std::span<const pairgen::PreferencePair> pairs, const DpoConfig& cfg);

/// Line-delimited JSON: one {"type":"stage",...} record per stage followed
/// by {"type":"step","step":..,"stage":..,"loss":..,"sigma_arg_mean":..,"lr":..}.
void write_training_log(std::ostream& out, const DpoResult& result);

}  // namespace flowpref::dpo
