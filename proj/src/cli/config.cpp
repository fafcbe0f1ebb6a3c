// SPDX-License-Identifier: Apache-2.0
#include "flowpref/cli/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/rng.hpp"
#include "flowpref/common/text_io.hpp"

namespace flowpref::cli {

using nlohmann::json;

namespace {

/// Walks one object, reading known keys and collecting every problem.
class Section {
public:
    Section(const json& j, std::string prefix, std::vector<std::string>& errors)
        : j_(j), prefix_(std::move(prefix)), errors_(errors) {
        if (!j_.is_object()) {
            errors_.push_back(path("") + " (expected an object)");
        }
    }

    template <typename T>
    void read(const char* key, T& dst) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) {
            return;
        }
        try {
            dst = j_.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(path(key) + " (wrong type)");
        }
    }

    Section sub(const char* key) {
        seen_.insert(key);
        static const json empty = json::object();
        if (!j_.is_object() || !j_.contains(key)) {
            return Section(empty, path(key), errors_);
        }
        return Section(j_.at(key), path(key), errors_);
    }

    /// Call after all reads: flags keys nobody asked for.
    void finish() {
        if (!j_.is_object()) {
            return;
        }
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                errors_.push_back(path(it.key()) + " (unknown key)");
            }
        }
    }

private:
    std::string path(const std::string& key) const {
        if (prefix_.empty()) {
            return key;
        }
        return key.empty() ? prefix_ : prefix_ + "." + key;
    }

    const json& j_;
    std::string prefix_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

[[noreturn]] void fail(const std::vector<std::string>& errors) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& e : errors) {
        msg << "\n  " << e;
    }
    throw ConfigError(msg.str());
}

}  // namespace

StageSeeds stage_seeds(std::uint64_t g) {
    namespace sd = seed_domain;
    StageSeeds s;
    s.pretrain = derive_seed(g, {sd::pretrain});
    s.pool = derive_seed(g, {sd::annotate, 0});
    s.annotate = derive_seed(g, {sd::annotate, 1});
    s.head = derive_seed(g, {sd::head});
    s.pair_prompts = derive_seed(g, {sd::prompts, 0});
    s.pairs = derive_seed(g, {sd::pairs});
    s.human_prompts = derive_seed(g, {sd::prompts, 1});
    s.human = derive_seed(g, {sd::human});
    s.dpo = derive_seed(g, {sd::dpo});
    s.eval_prompts = derive_seed(g, {sd::prompts, 2});
    s.eval = derive_seed(g, {sd::eval});
    return s;
}

void derive_stage_seeds(RunConfig& cfg) {
    const auto s = stage_seeds(cfg.seed);
    cfg.pretrain.seed = s.pretrain;
    cfg.scorer.pool.seed = s.pool;
    cfg.scorer.head.seed = s.head;
    cfg.pairs.gen.seed = s.pairs;
    cfg.dpo.seed = s.dpo;
}

void validate(const RunConfig& c) {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const char* key) {
        if (!ok) {
            bad.emplace_back(key);
        }
    };
    check(!c.out.empty(), "out");
    check(c.threads >= 1, "threads");
    check(c.task.dim >= 1, "task.dim");
    check(c.task.num_classes >= 1, "task.num_classes");
    check(c.task.components_per_class >= 1, "task.components_per_class");
    check(c.task.component_scale > 0.0, "task.component_scale");
    check(c.pretrain.steps >= 1, "pretrain.steps");
    check(c.pretrain.batch_size >= 1, "pretrain.batch_size");
    check(!c.pretrain.hidden.empty(), "pretrain.hidden");
    check(c.pretrain.lr > 0.0, "pretrain.lr");
    check(c.pretrain.cond_drop_prob >= 0.0 && c.pretrain.cond_drop_prob <= 1.0, "pretrain.cond_drop_prob");
    check(c.pretrain.heldout_size >= 1, "pretrain.heldout_size");
    check(c.scorer.pool.num_prompts >= 1, "scorer.num_prompts");
    check(!c.scorer.pool.gammas.empty(), "scorer.gammas");
    check(c.scorer.pool.n_steps >= 1, "scorer.n_steps");
    check(c.scorer.pool.text_prob >= 0.0 && c.scorer.pool.text_prob <= 1.0, "scorer.text_prob");
    check(c.scorer.annotation_noise >= 0.0, "scorer.annotation_noise");
    check(c.scorer.extractor_params.tau > 0.0, "scorer.tau");
    check(c.scorer.extractor_params.text_tau > 0.0, "scorer.text_tau");
    check(c.scorer.head.hidden >= 1, "scorer.hidden");
    check(c.scorer.head.batch_size >= 1, "scorer.batch_size");
    check(c.scorer.head.lr > 0.0, "scorer.lr");
    check(c.scorer.head.val_fraction >= 0.0 && c.scorer.head.val_fraction < 1.0, "scorer.val_fraction");
    check(c.pairs.gen.num_candidates >= 2, "pairs.num_candidates");
    check(c.pairs.gen.gamma >= 0.0, "pairs.gamma");
    check(c.pairs.gen.n_steps >= 1, "pairs.n_steps");
    check(c.pairs.gen.min_gap >= 0.0, "pairs.min_gap");
    check(c.pairs.num_prompts >= 1, "pairs.num_prompts");
    check(c.pairs.text_prob >= 0.0 && c.pairs.text_prob <= 1.0, "pairs.text_prob");
    check(c.dpo.beta > 0.0, "dpo.beta");
    check(c.dpo.score_delta >= 0.0 && c.dpo.score_delta <= 1.0, "dpo.score_delta");
    check(c.dpo.batch_size >= 1, "dpo.batch_size");
    check(c.dpo.lr > 0.0, "dpo.lr");
    check(c.eval.num_prompts >= 1, "eval.num_prompts");
    check(c.eval.gamma >= 0.0, "eval.gamma");
    check(c.eval.n_steps >= 1, "eval.n_steps");
    check(c.eval.text_prob >= 0.0 && c.eval.text_prob <= 1.0, "eval.text_prob");
    if (!bad.empty()) {
        for (auto& b : bad) {
            b += " (out of range)";
        }
        fail(bad);
    }
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    std::vector<std::string> errors;
    Section root(j, "", errors);
    root.read("seed", c.seed);
    root.read("out", c.out);
    root.read("threads", c.threads);
    {
        auto s = root.sub("task");
        s.read("dim", c.task.dim);
        s.read("num_classes", c.task.num_classes);
        s.read("components_per_class", c.task.components_per_class);
        s.read("class_radius", c.task.class_radius);
        s.read("component_offset", c.task.component_offset);
        s.read("component_scale", c.task.component_scale);
        s.read("seed", c.task.seed);
        s.finish();
    }
    {
        auto s = root.sub("pretrain");
        s.read("steps", c.pretrain.steps);
        s.read("batch_size", c.pretrain.batch_size);
        s.read("hidden", c.pretrain.hidden);
        s.read("lr", c.pretrain.lr);
        s.read("warmup_steps", c.pretrain.warmup_steps);
        s.read("weight_decay", c.pretrain.weight_decay);
        s.read("cond_drop_prob", c.pretrain.cond_drop_prob);
        s.read("heldout_size", c.pretrain.heldout_size);
        s.finish();
    }
    {
        auto s = root.sub("scorer");
        s.read("extractor", c.scorer.extractor);
        s.read("tau", c.scorer.extractor_params.tau);
        s.read("text_tau", c.scorer.extractor_params.text_tau);
        s.read("clip_bound", c.scorer.extractor_params.clip_bound);
        s.read("num_prompts", c.scorer.pool.num_prompts);
        s.read("gammas", c.scorer.pool.gammas);
        s.read("n_steps", c.scorer.pool.n_steps);
        s.read("text_prob", c.scorer.pool.text_prob);
        s.read("annotation_noise", c.scorer.annotation_noise);
        s.read("hidden", c.scorer.head.hidden);
        s.read("steps", c.scorer.head.steps);
        s.read("batch_size", c.scorer.head.batch_size);
        s.read("lr", c.scorer.head.lr);
        s.read("warmup_steps", c.scorer.head.warmup_steps);
        s.read("weight_decay", c.scorer.head.weight_decay);
        s.read("val_fraction", c.scorer.head.val_fraction);
        s.finish();
    }
    {
        auto s = root.sub("pairs");
        s.read("num_candidates", c.pairs.gen.num_candidates);
        s.read("gamma", c.pairs.gen.gamma);
        s.read("n_steps", c.pairs.gen.n_steps);
        s.read("min_gap", c.pairs.gen.min_gap);
        s.read("num_prompts", c.pairs.num_prompts);
        s.read("text_prob", c.pairs.text_prob);
        s.read("human_pairs", c.pairs.human_pairs);
        s.read("human_prompts", c.pairs.human_prompts);
        s.finish();
    }
    {
        auto s = root.sub("dpo");
        s.read("beta", c.dpo.beta);
        s.read("score_delta", c.dpo.score_delta);
        s.read("stage1_steps", c.dpo.stage1_steps);
        s.read("stage2_steps", c.dpo.stage2_steps);
        s.read("batch_size", c.dpo.batch_size);
        s.read("lr", c.dpo.lr);
        s.read("warmup_steps", c.dpo.warmup_steps);
        s.read("weight_decay", c.dpo.weight_decay);
        s.finish();
    }
    {
        auto s = root.sub("eval");
        s.read("num_prompts", c.eval.num_prompts);
        s.read("gamma", c.eval.gamma);
        s.read("n_steps", c.eval.n_steps);
        s.read("text_prob", c.eval.text_prob);
        s.finish();
    }
    root.finish();
    if (!errors.empty()) {
        fail(errors);
    }
    derive_stage_seeds(c);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["threads"] = c.threads;
    j["task"] = {{"dim", c.task.dim},
                 {"num_classes", c.task.num_classes},
                 {"components_per_class", c.task.components_per_class},
                 {"class_radius", c.task.class_radius},
                 {"component_offset", c.task.component_offset},
                 {"component_scale", c.task.component_scale},
                 {"seed", c.task.seed}};
    j["pretrain"] = {{"steps", c.pretrain.steps},
                     {"batch_size", c.pretrain.batch_size},
                     {"hidden", c.pretrain.hidden},
                     {"lr", c.pretrain.lr},
                     {"warmup_steps", c.pretrain.warmup_steps},
                     {"weight_decay", c.pretrain.weight_decay},
                     {"cond_drop_prob", c.pretrain.cond_drop_prob},
                     {"heldout_size", c.pretrain.heldout_size}};
    j["scorer"] = {{"extractor", c.scorer.extractor},
                   {"tau", c.scorer.extractor_params.tau},
                   {"text_tau", c.scorer.extractor_params.text_tau},
                   {"clip_bound", c.scorer.extractor_params.clip_bound},
                   {"num_prompts", c.scorer.pool.num_prompts},
                   {"gammas", c.scorer.pool.gammas},
                   {"n_steps", c.scorer.pool.n_steps},
                   {"text_prob", c.scorer.pool.text_prob},
                   {"annotation_noise", c.scorer.annotation_noise},
                   {"hidden", c.scorer.head.hidden},
                   {"steps", c.scorer.head.steps},
                   {"batch_size", c.scorer.head.batch_size},
                   {"lr", c.scorer.head.lr},
                   {"warmup_steps", c.scorer.head.warmup_steps},
                   {"weight_decay", c.scorer.head.weight_decay},
                   {"val_fraction", c.scorer.head.val_fraction}};
    j["pairs"] = {{"num_candidates", c.pairs.gen.num_candidates},
                  {"gamma", c.pairs.gen.gamma},
                  {"n_steps", c.pairs.gen.n_steps},
                  {"min_gap", c.pairs.gen.min_gap},
                  {"num_prompts", c.pairs.num_prompts},
                  {"text_prob", c.pairs.text_prob},
                  {"human_pairs", c.pairs.human_pairs},
                  {"human_prompts", c.pairs.human_prompts}};
    j["dpo"] = {{"beta", c.dpo.beta},
                {"score_delta", c.dpo.score_delta},
                {"stage1_steps", c.dpo.stage1_steps},
                {"stage2_steps", c.dpo.stage2_steps},
                {"batch_size", c.dpo.batch_size},
                {"lr", c.dpo.lr},
                {"warmup_steps", c.dpo.warmup_steps},
                {"weight_decay", c.dpo.weight_decay}};
    j["eval"] = {{"num_prompts", c.eval.num_prompts},
                 {"gamma", c.eval.gamma},
                 {"n_steps", c.eval.n_steps},
                 {"text_prob", c.eval.text_prob}};
    return j;
}

std::vector<std::string> apply_overrides(RunConfig& cfg, const Overrides& ov) {
    std::vector<std::string> applied;
    if (ov.seed) {
        cfg.seed = *ov.seed;
        applied.push_back("seed=" + std::to_string(*ov.seed));
    }
    if (ov.out) {
        cfg.out = *ov.out;
        applied.push_back("out=" + *ov.out);
    }
    if (ov.threads) {
        cfg.threads = *ov.threads;
        applied.push_back("threads=" + std::to_string(*ov.threads));
    }
    if (ov.beta) {
        cfg.dpo.beta = *ov.beta;
        applied.push_back("dpo.beta=" + format_double(*ov.beta));
    }
    if (ov.score_delta) {
        cfg.dpo.score_delta = *ov.score_delta;
        applied.push_back("dpo.score_delta=" + format_double(*ov.score_delta));
    }
    if (ov.num_candidates) {
        cfg.pairs.gen.num_candidates = *ov.num_candidates;
        applied.push_back("pairs.num_candidates=" + std::to_string(*ov.num_candidates));
    }
    if (ov.gamma) {
        cfg.pairs.gen.gamma = *ov.gamma;
        cfg.eval.gamma = *ov.gamma;
        applied.push_back("gamma=" + format_double(*ov.gamma));
    }
    if (ov.min_gap) {
        cfg.pairs.gen.min_gap = *ov.min_gap;
        applied.push_back("pairs.min_gap=" + format_double(*ov.min_gap));
    }
    if (ov.human_pairs) {
        cfg.pairs.human_pairs = *ov.human_pairs;
        applied.push_back("pairs.human_pairs=" + *ov.human_pairs);
    }
    derive_stage_seeds(cfg);
    validate(cfg);
    return applied;
}

}  // namespace flowpref::cli
