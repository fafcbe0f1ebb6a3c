// SPDX-License-Identifier: Apache-2.0
#include "flowpref/eval/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "flowpref/common/errors.hpp"
#include "flowpref/flow/model_io.hpp"

namespace flowpref::eval {

EvalReport evaluate(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                    const scorer::ScoreHead& head, const scorer::ScoreExtractor& extractor,
                    const flow::ToyTask& task, std::span<const flow::Condition> conds,
                    const SamplingSettings& settings, std::uint64_t prompt_seed) {
    if (conds.empty()) {
        throw InputError("evaluate: no prompts");
    }
    if (!policy.same_architecture(reference)) {
        throw InputError("evaluate: policy and reference architectures differ");
    }
    const auto policy_samples = sample_prompts(policy, conds, settings);
    const auto reference_samples = sample_prompts(reference, conds, settings);
    const auto pg = good_probs(policy_samples, conds, head, extractor);
    const auto rg = good_probs(reference_samples, conds, head, extractor);
    const auto wr = win_rate_from(pg.per_prompt, rg.per_prompt);

    std::vector<Vec> target;
    target.reserve(conds.size());
    for (std::size_t i = 0; i < conds.size(); ++i) {
        Rng rng(derive_seed(settings.seed, {i, 1}));
        target.push_back(task.sample(conds[i].class_id, rng));
    }

    std::vector<double> diffs(conds.size());
    for (std::size_t i = 0; i < conds.size(); ++i) {
        diffs[i] = pg.per_prompt[i] - rg.per_prompt[i];
    }

    EvalReport r;
    r.policy_id = flow::checkpoint_id(policy);
    r.reference_id = flow::checkpoint_id(reference);
    r.head_id = scorer::head_checkpoint_id(head);
    r.eval_seed = settings.seed;
    r.prompt_seed = prompt_seed;
    r.gamma = settings.gamma;
    r.n_steps = settings.n_steps;
    r.n_prompts = conds.size();
    r.energy_distance = energy_distance(policy_samples, target);
    r.mean_good_prob_policy = pg.mean;
    r.mean_good_prob_reference = rg.mean;
    r.win_rate = wr.win_rate;
    r.good_prob_margin = pg.mean - rg.mean;
    r.margin_lower_95 = bootstrap_mean_lower_bound(diffs, 0.95, 2000, derive_seed(settings.seed, {2}));
    return r;
}

void write_report(std::ostream& out, const EvalReport& r) {
    nlohmann::ordered_json j;
    j["policy_id"] = r.policy_id;
    j["reference_id"] = r.reference_id;
    j["head_id"] = r.head_id;
    j["eval_seed"] = r.eval_seed;
    j["prompt_seed"] = r.prompt_seed;
    j["gamma"] = r.gamma;
    j["n_steps"] = r.n_steps;
    j["n_prompts"] = r.n_prompts;
    j["energy_distance"] = r.energy_distance;
    j["mean_good_prob_policy"] = r.mean_good_prob_policy;
    j["mean_good_prob_reference"] = r.mean_good_prob_reference;
    j["win_rate"] = r.win_rate;
    j["good_prob_margin"] = r.good_prob_margin;
    j["margin_lower_95"] = r.margin_lower_95;
    out << j.dump(2) << '\n';
}

EvalReport read_report(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
        EvalReport r;
        r.policy_id = j.at("policy_id").get<std::string>();
        r.reference_id = j.at("reference_id").get<std::string>();
        r.head_id = j.at("head_id").get<std::string>();
        r.eval_seed = j.at("eval_seed").get<std::uint64_t>();
        r.prompt_seed = j.at("prompt_seed").get<std::uint64_t>();
        r.gamma = j.at("gamma").get<double>();
        r.n_steps = j.at("n_steps").get<std::size_t>();
        r.n_prompts = j.at("n_prompts").get<std::size_t>();
        r.energy_distance = j.at("energy_distance").get<double>();
        r.mean_good_prob_policy = j.at("mean_good_prob_policy").get<double>();
        r.mean_good_prob_reference = j.at("mean_good_prob_reference").get<double>();
        r.win_rate = j.at("win_rate").get<double>();
        r.good_prob_margin = j.at("good_prob_margin").get<double>();
        r.margin_lower_95 = j.at("margin_lower_95").get<double>();
        return r;
    } catch (const std::exception& e) {
        throw ParseError(1, std::string("malformed eval report: ") + e.what());
    }
}

std::string summary_table(const EvalReport& r) {
    std::ostringstream out;
    auto row = [&](const char* name, double v) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-28s %12.6f\n", name, v);
        out << buf;
    };
    out << "metric                            value\n";
    row("energy_distance", r.energy_distance);
    row("mean_good_prob_policy", r.mean_good_prob_policy);
    row("mean_good_prob_reference", r.mean_good_prob_reference);
    row("good_prob_margin", r.good_prob_margin);
    row("margin_lower_95", r.margin_lower_95);
    row("win_rate", r.win_rate);
    out << "  n_prompts                    " << r.n_prompts << '\n';
    return out.str();
}

}  // namespace flowpref::eval
