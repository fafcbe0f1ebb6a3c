// SPDX-License-Identifier: Apache-2.0
#include "flowpref/dpo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <json.hpp>

#include "flowpref/common/errors.hpp"
#include "flowpref/dpo/curriculum.hpp"
#include "flowpref/dpo/flow_dpo.hpp"
#include "flowpref/nn/adamw.hpp"

namespace flowpref::dpo {

namespace {

void validate(const DpoConfig& cfg) {
    if (!(cfg.beta > 0.0)) {
        throw InputError("DpoConfig: beta must be positive");
    }
    if (cfg.batch_size == 0) {
        throw InputError("DpoConfig: batch_size must be positive");
    }
    if (!(cfg.lr > 0.0)) {
        throw InputError("DpoConfig: lr must be positive");
    }
}

/// Runs `steps` AdamW updates of `policy` on `pairs`, appending to `log`.
void run_stage(flow::VelocityModel& policy, const flow::VelocityModel& reference,
               std::span<const pairgen::PreferencePair> pairs, std::size_t steps, int stage_label,
               std::uint64_t seed, const DpoConfig& cfg, std::vector<DpoLogEntry>& log) {
    nn::AdamW opt(policy.net().num_params(), nn::AdamWConfig{.base_lr = cfg.lr, .warmup_steps = cfg.warmup_steps,
                                                             .weight_decay = cfg.weight_decay});
    Rng rng(seed);
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t cursor = 0;

    std::vector<pairgen::PreferencePair> batch(cfg.batch_size);
    std::vector<PairNoise> noise(cfg.batch_size);
    Vec grad(policy.net().num_params());
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t b = 0; b < cfg.batch_size; ++b) {
            if (cursor == order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            batch[b] = pairs[order[cursor++]];
            noise[b] = draw_pair_noise(policy.dim(), rng);
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        const double lr = opt.current_lr();
        const auto terms = flow_dpo_loss(policy, reference, batch, noise, cfg.beta, grad);
        const std::size_t global_step = log.size();
        if (!std::isfinite(terms.loss)) {
            throw NumericError("dpo_train: non-finite loss at step " + std::to_string(global_step));
        }
        try {
            opt.step(policy.net().params(), grad);
        } catch (const NumericError& e) {
            throw NumericError("dpo_train: step " + std::to_string(global_step) + ": " + e.what());
        }
        log.push_back(DpoLogEntry{global_step, stage_label, terms.loss, terms.mean_arg, lr});
    }
}

}  // namespace

DpoResult dpo_train(const flow::VelocityModel& policy_init, std::span<const pairgen::PreferencePair> pairs,
                    const DpoConfig& cfg) {
    validate(cfg);
    if (pairs.empty()) {
        throw InputError("dpo_train: empty preference dataset");
    }
    const auto split = split_curriculum(pairs, cfg.score_delta);
    std::size_t steps1 = cfg.stage1_steps;
    std::size_t steps2 = cfg.stage2_steps;
    if (split.stage1.empty()) {
        steps2 += steps1;
        steps1 = 0;
    } else if (split.stage2.empty()) {
        steps1 += steps2;
        steps2 = 0;
    }

    const flow::VelocityModel reference = policy_init;
    DpoResult result{policy_init, {}, {}};
    std::uint64_t executed = 0;
    const std::pair<const std::vector<pairgen::PreferencePair>*, std::size_t> stages[] = {{&split.stage1, steps1},
                                                                                         {&split.stage2, steps2}};
    for (int k = 0; k < 2; ++k) {
        const auto& [stage_pairs, steps] = stages[k];
        StageSummary summary{k + 1, stage_pairs->size(), steps, stage_pairs->empty()};
        result.stages.push_back(summary);
        if (stage_pairs->empty()) {
            continue;
        }
        run_stage(result.policy, reference, *stage_pairs, steps, k + 1, derive_seed(cfg.seed, {executed}), cfg,
                  result.log);
        ++executed;
    }
    return result;
}

DpoResult dpo_train_single_stage(const flow::VelocityModel& policy_init,
                                 std::span<const pairgen::PreferencePair> pairs, const DpoConfig& cfg) {
    validate(cfg);
    if (pairs.empty()) {
        throw InputError("dpo_train_single_stage: empty preference dataset");
    }
    const flow::VelocityModel reference = policy_init;
    DpoResult result{policy_init, {}, {}};
    const std::size_t steps = cfg.stage1_steps + cfg.stage2_steps;
    result.stages.push_back(StageSummary{0, pairs.size(), steps, false});
    run_stage(result.policy, reference, pairs, steps, 0, derive_seed(cfg.seed, {0}), cfg, result.log);
    return result;
}

void write_training_log(std::ostream& out, const DpoResult& result) {
    for (const auto& s : result.stages) {
        nlohmann::json j;
        j["type"] = "stage";
        j["stage"] = s.stage;
        j["pairs"] = s.pairs;
        j["steps"] = s.steps;
        j["skipped"] = s.skipped;
        out << j.dump() << '\n';
    }
    for (const auto& e : result.log) {
        nlohmann::json j;
        j["type"] = "step";
        j["step"] = e.step;
        j["stage"] = e.stage;
        j["loss"] = e.loss;
        j["sigma_arg_mean"] = e.mean_arg;
        j["lr"] = e.lr;
        out << j.dump() << '\n';
    }
}

}  // namespace flowpref::dpo
