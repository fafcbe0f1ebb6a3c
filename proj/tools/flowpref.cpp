// SPDX-License-Identifier: Apache-2.0
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "flowpref/cli/config.hpp"
#include "flowpref/cli/stages.hpp"

namespace {

using flowpref::cli::Overrides;
using flowpref::cli::RunContext;

template <typename T>
void add_override(CLI::App& app, const std::string& flag, std::optional<T>& slot, const std::string& help) {
    app.add_option_function<T>(flag, [&slot](const T& v) { slot = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowpref: preference alignment for flow-matching generators (toy scale)"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    const std::map<std::string, std::string> subcommands{
        {"pretrain", "train the reference velocity model"},
        {"train-scorer", "annotate a sample pool and fit the score head"},
        {"gen-pairs", "build the preference pair dataset"},
        {"dpo-train", "align the policy with curriculum Flow-DPO"},
        {"eval", "compare policy and reference, write the report"},
        {"pipeline", "run all five stages in order"},
    };
    for (const auto& [name, help] : subcommands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
        add_override(*sub, "--seed", ov.seed, "global seed");
        add_override(*sub, "--out", ov.out, "output directory");
        add_override(*sub, "--threads", ov.threads, "worker threads");
        add_override(*sub, "--beta", ov.beta, "DPO beta");
        add_override(*sub, "--score-delta", ov.score_delta, "curriculum threshold in [0,1]");
        add_override(*sub, "--num-candidates", ov.num_candidates, "candidates per prompt");
        add_override(*sub, "--gamma", ov.gamma, "guidance scale for pair generation and eval");
        add_override(*sub, "--min-gap", ov.min_gap, "minimum complexity score kept");
        add_override(*sub, "--human-pairs", ov.human_pairs, "JSONL file of human preference pairs");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        RunContext ctx;
        ctx.cfg = flowpref::cli::load_config(config_path);
        ctx.overrides = flowpref::cli::apply_overrides(ctx.cfg, ov);
        ctx.log = &std::cerr;

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "pretrain") {
            flowpref::cli::run_pretrain(ctx);
        } else if (name == "train-scorer") {
            flowpref::cli::run_train_scorer(ctx);
        } else if (name == "gen-pairs") {
            flowpref::cli::run_gen_pairs(ctx);
        } else if (name == "dpo-train") {
            flowpref::cli::run_dpo_train(ctx);
        } else {
            const auto report =
                name == "eval" ? flowpref::cli::run_eval(ctx) : flowpref::cli::run_pipeline(ctx);
            std::cout << flowpref::eval::summary_table(report);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
