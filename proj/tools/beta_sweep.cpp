// SPDX-License-Identifier: Apache-2.0
// Re-runs DPO and evaluation over a grid of beta and learning rate, reusing
// the pretrain, scorer and pairs artifacts of an existing run directory.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowpref/cli/config.hpp"
#include "flowpref/cli/stages.hpp"
#include "flowpref/dpo/trainer.hpp"
#include "flowpref/eval/report.hpp"
#include "flowpref/flow/model_io.hpp"
#include "flowpref/pairgen/dataset.hpp"

int main(int argc, char** argv) {
    CLI::App app{"grid search over DPO beta and learning rate"};
    std::string config_path;
    std::string out;
    std::vector<double> betas{100, 300, 600, 1000};
    std::vector<double> lrs;
    std::size_t threads = 1;
    app.add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out, "run directory holding pretrain/, scorer/ and pairs/");
    app.add_option("--betas", betas, "beta values")->delimiter(',');
    app.add_option("--lrs", lrs, "learning rates (default: config value)")->delimiter(',');
    app.add_option("--threads", threads, "worker threads");
    CLI11_PARSE(app, argc, argv);

    try {
        using namespace flowpref;
        auto cfg = cli::load_config(config_path);
        if (!out.empty()) {
            cfg.out = out;
        }
        if (lrs.empty()) {
            lrs.push_back(cfg.dpo.lr);
        }
        const auto reference = flow::load_velocity_model(cli::artifact_path(cfg, "pretrain", "model.txt"));
        const auto head = scorer::load_head(cli::artifact_path(cfg, "scorer", "head.txt"));
        const auto ds = pairgen::load_dataset(cli::artifact_path(cfg, "pairs", "pairs.jsonl"));
        const auto task = flow::ToyTask::generate(cfg.task);
        const auto extractor = scorer::make_extractor(cfg.scorer.extractor, task, cfg.scorer.extractor_params);
        const auto seeds = cli::stage_seeds(cfg.seed);
        const auto conds =
            flow::draw_conditions(task.num_classes(), cfg.eval.num_prompts, cfg.eval.text_prob, seeds.eval_prompts);
        const eval::SamplingSettings settings{cfg.eval.gamma, cfg.eval.n_steps, seeds.eval, threads};

        std::printf("%10s %10s %10s %10s %10s %10s %10s\n", "beta", "lr", "p_policy", "p_ref", "margin", "lower95",
                    "win_rate");
        for (double lr : lrs) {
            for (double beta : betas) {
                auto dcfg = cfg.dpo;
                dcfg.beta = beta;
                dcfg.lr = lr;
                const auto result = dpo::dpo_train(reference, ds.pairs, dcfg);
                const auto r =
                    eval::evaluate(result.policy, reference, head, *extractor, task, conds, settings, seeds.eval_prompts);
                std::printf("%10g %10g %10.4f %10.4f %10.4f %10.4f %10.4f\n", beta, lr, r.mean_good_prob_policy,
                            r.mean_good_prob_reference, r.good_prob_margin, r.margin_lower_95, r.win_rate);
                std::fflush(stdout);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
