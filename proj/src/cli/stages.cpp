// SPDX-License-Identifier: Apache-2.0
#include "flowpref/cli/stages.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/text_io.hpp"
#include "flowpref/flow/model_io.hpp"

namespace flowpref::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// Reproducibility-relevant config only: `out` and `threads` never change
/// artifact contents.
ojson manifest_config(const RunConfig& cfg) {
    auto j = config_to_json(cfg);
    j.erase("out");
    j.erase("threads");
    return j;
}

ojson manifest_overrides(const std::vector<std::string>& overrides) {
    ojson arr = ojson::array();
    for (const auto& o : overrides) {
        if (o.rfind("out=", 0) != 0 && o.rfind("threads=", 0) != 0) {
            arr.push_back(o);
        }
    }
    return arr;
}

std::string file_id(const std::string& path) { return hex_id(fnv1a(read_file(path))); }

class Manifest {
public:
    Manifest(const RunContext& ctx, std::string stage) : ctx_(ctx), stage_(std::move(stage)) {
        j_["stage"] = stage_;
        j_["seed"] = ctx.cfg.seed;
        j_["overrides"] = manifest_overrides(ctx.overrides);
        j_["config"] = manifest_config(ctx.cfg);
        j_["inputs"] = ojson::object();
        j_["outputs"] = ojson::object();
        j_["metrics"] = ojson::object();
    }

    void input(std::string_view stage, std::string_view file) {
        const std::string rel = std::string(stage) + "/" + std::string(file);
        j_["inputs"][rel] = file_id(artifact_path(ctx_.cfg, stage, file));
    }

    void output(std::string_view file) {
        j_["outputs"][std::string(file)] = file_id(artifact_path(ctx_.cfg, stage_, file));
    }

    template <typename T>
    void metric(const char* key, const T& value) {
        j_["metrics"][key] = value;
    }

    void save() const { write_file(artifact_path(ctx_.cfg, stage_, "manifest.json"), j_.dump(2) + "\n"); }

private:
    const RunContext& ctx_;
    std::string stage_;
    ojson j_;
};

/// Throws IoError naming the subcommand that produces the missing file.
std::string require(const RunConfig& cfg, std::string_view stage, std::string_view file,
                    std::string_view producer) {
    const auto path = artifact_path(cfg, stage, file);
    if (!fs::exists(path)) {
        throw IoError("missing upstream artifact " + path + "; run `flowpref " + std::string(producer) +
                      "` first");
    }
    return path;
}

void prepare_dir(const RunConfig& cfg, std::string_view stage) {
    std::error_code ec;
    fs::create_directories(fs::path(cfg.out) / stage, ec);
    if (ec) {
        throw IoError("cannot create " + (fs::path(cfg.out) / stage).string() + ": " + ec.message());
    }
}

std::ostream& log_of(const RunContext& ctx) {
    static std::ostringstream sink;
    if (ctx.log != nullptr) {
        return *ctx.log;
    }
    sink.str("");
    return sink;
}

flow::ToyTask make_task(const RunConfig& cfg) { return flow::ToyTask::generate(cfg.task); }

std::unique_ptr<scorer::ScoreExtractor> make_scorer_extractor(const RunConfig& cfg, const flow::ToyTask& task) {
    return scorer::make_extractor(cfg.scorer.extractor, task, cfg.scorer.extractor_params);
}

scorer::UtilityOracle make_oracle(const RunConfig& cfg, std::span<const scorer::AnnotatedSample> annotations) {
    std::vector<scorer::ScoreVector> pool;
    pool.reserve(annotations.size());
    for (const auto& a : annotations) {
        pool.push_back(a.scores);
    }
    scorer::UtilityOracle oracle;
    oracle.reference = scorer::ScoreNormalizer::fit(pool);
    oracle.noise_std = cfg.scorer.annotation_noise;
    return oracle;
}

std::vector<scorer::AnnotatedSample> load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return scorer::read_annotations(in);
}

}  // namespace

std::string artifact_path(const RunConfig& cfg, std::string_view stage, std::string_view file) {
    return (fs::path(cfg.out) / stage / file).string();
}

void run_pretrain(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& log = log_of(ctx);
    prepare_dir(cfg, "pretrain");
    const auto task = make_task(cfg);
    const auto result = flow::pretrain(task, cfg.pretrain);
    flow::save_velocity_model(artifact_path(cfg, "pretrain", "model.txt"), result.model);

    Manifest m(ctx, "pretrain");
    m.output("model.txt");
    m.metric("heldout_loss", result.heldout_loss);
    m.metric("zero_baseline_loss", result.zero_baseline_loss);
    m.metric("model_id", flow::checkpoint_id(result.model));
    m.save();
    log << "pretrain: heldout fm loss " << result.heldout_loss << " (zero model " << result.zero_baseline_loss
        << ")\n";
}

void run_train_scorer(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& log = log_of(ctx);
    const auto model = flow::load_velocity_model(require(cfg, "pretrain", "model.txt", "pretrain"));
    prepare_dir(cfg, "scorer");
    const auto task = make_task(cfg);
    const auto extractor = make_scorer_extractor(cfg, task);

    auto pool_cfg = cfg.scorer.pool;
    pool_cfg.threads = cfg.threads;
    const auto pool = scorer::generate_score_pool(model, *extractor, pool_cfg);
    scorer::UtilityOracle oracle;
    oracle.reference = scorer::ScoreNormalizer::fit(pool);
    oracle.noise_std = cfg.scorer.annotation_noise;
    Rng rng(stage_seeds(cfg.seed).annotate);
    const auto annotations = scorer::annotate_by_tertiles(pool, oracle, rng);
    {
        std::ostringstream out;
        scorer::write_annotations(out, annotations);
        write_file(artifact_path(cfg, "scorer", "annotations.jsonl"), out.str());
    }
    const auto trained = scorer::train_head(annotations, cfg.scorer.head);
    scorer::save_head(artifact_path(cfg, "scorer", "head.txt"), trained.head);

    Manifest m(ctx, "scorer");
    m.input("pretrain", "model.txt");
    m.output("annotations.jsonl");
    m.output("head.txt");
    m.metric("annotations", annotations.size());
    m.metric("train_accuracy", trained.train_accuracy);
    m.metric("val_accuracy", trained.val_accuracy);
    m.metric("head_id", scorer::head_checkpoint_id(trained.head));
    m.save();
    log << "train-scorer: " << annotations.size() << " annotations, train acc " << trained.train_accuracy
        << ", val acc " << trained.val_accuracy << "\n";
}

void run_gen_pairs(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& log = log_of(ctx);
    const auto model = flow::load_velocity_model(require(cfg, "pretrain", "model.txt", "pretrain"));
    const auto head = scorer::load_head(require(cfg, "scorer", "head.txt", "train-scorer"));
    const auto annotations_path = require(cfg, "scorer", "annotations.jsonl", "train-scorer");
    prepare_dir(cfg, "pairs");
    const auto task = make_task(cfg);
    const auto extractor = make_scorer_extractor(cfg, task);
    const auto seeds = stage_seeds(cfg.seed);

    std::vector<pairgen::PreferencePair> human;
    if (!cfg.pairs.human_pairs.empty()) {
        human = pairgen::ingest_human(cfg.pairs.human_pairs);
    } else if (cfg.pairs.human_prompts > 0) {
        const auto oracle = make_oracle(cfg, load_annotations(annotations_path));
        const auto conds = flow::draw_conditions(task.num_classes(), cfg.pairs.human_prompts, cfg.pairs.text_prob,
                                                 seeds.human_prompts);
        human = pairgen::synthesize_human_pairs(model, head, *extractor, oracle, conds, cfg.pairs.gen.gamma,
                                                cfg.pairs.gen.n_steps, seeds.human, cfg.threads);
    }

    const auto conds =
        flow::draw_conditions(task.num_classes(), cfg.pairs.num_prompts, cfg.pairs.text_prob, seeds.pair_prompts);
    auto gen = cfg.pairs.gen;
    gen.threads = cfg.threads;
    auto ds = pairgen::build_dataset(model, head, *extractor, conds, gen, human);
    ds.header.prompt_seed = seeds.pair_prompts;
    ds.header.text_prob = cfg.pairs.text_prob;
    pairgen::save_dataset(artifact_path(cfg, "pairs", "pairs.jsonl"), ds);

    Manifest m(ctx, "pairs");
    m.input("pretrain", "model.txt");
    m.input("scorer", "head.txt");
    m.input("scorer", "annotations.jsonl");
    if (!cfg.pairs.human_pairs.empty()) {
        m.metric("human_pairs_source_id", file_id(cfg.pairs.human_pairs));
    }
    m.output("pairs.jsonl");
    m.metric("auto_pairs", ds.header.auto_pairs);
    m.metric("human_pairs", ds.header.human_pairs);
    m.metric("rejected_prompts", ds.header.rejected_prompts);
    m.metric("filtered_pairs", ds.header.filtered_pairs);
    m.save();
    log << "gen-pairs: " << ds.header.auto_pairs << " auto + " << ds.header.human_pairs << " human pairs, "
        << ds.header.rejected_prompts << " prompts rejected, " << ds.header.filtered_pairs << " filtered\n";
}

void run_dpo_train(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& log = log_of(ctx);
    const auto reference = flow::load_velocity_model(require(cfg, "pretrain", "model.txt", "pretrain"));
    const auto ds = pairgen::load_dataset(require(cfg, "pairs", "pairs.jsonl", "gen-pairs"));
    prepare_dir(cfg, "dpo");
    const auto result = dpo::dpo_train(reference, ds.pairs, cfg.dpo);
    flow::save_velocity_model(artifact_path(cfg, "dpo", "policy.txt"), result.policy);
    {
        std::ostringstream out;
        dpo::write_training_log(out, result);
        write_file(artifact_path(cfg, "dpo", "training_log.jsonl"), out.str());
    }

    Manifest m(ctx, "dpo");
    m.input("pretrain", "model.txt");
    m.input("pairs", "pairs.jsonl");
    m.output("policy.txt");
    m.output("training_log.jsonl");
    ojson stages = ojson::array();
    for (const auto& s : result.stages) {
        stages.push_back({{"stage", s.stage}, {"pairs", s.pairs}, {"steps", s.steps}, {"skipped", s.skipped}});
        log << "dpo-train: stage " << s.stage << ": " << s.pairs << " pairs, " << s.steps << " steps"
            << (s.skipped ? " (skipped)" : "") << "\n";
    }
    m.metric("stages", stages);
    if (!result.log.empty()) {
        m.metric("final_loss", result.log.back().loss);
    }
    m.metric("policy_id", flow::checkpoint_id(result.policy));
    m.save();
}

eval::EvalReport run_eval(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const auto reference = flow::load_velocity_model(require(cfg, "pretrain", "model.txt", "pretrain"));
    const auto head = scorer::load_head(require(cfg, "scorer", "head.txt", "train-scorer"));
    const auto policy = flow::load_velocity_model(require(cfg, "dpo", "policy.txt", "dpo-train"));
    prepare_dir(cfg, "eval");
    const auto task = make_task(cfg);
    const auto extractor = make_scorer_extractor(cfg, task);
    const auto seeds = stage_seeds(cfg.seed);

    const auto conds =
        flow::draw_conditions(task.num_classes(), cfg.eval.num_prompts, cfg.eval.text_prob, seeds.eval_prompts);
    eval::SamplingSettings settings{cfg.eval.gamma, cfg.eval.n_steps, seeds.eval, cfg.threads};
    const auto report = eval::evaluate(policy, reference, head, *extractor, task, conds, settings, seeds.eval_prompts);
    {
        std::ostringstream out;
        eval::write_report(out, report);
        write_file(artifact_path(cfg, "eval", "report.json"), out.str());
    }

    Manifest m(ctx, "eval");
    m.input("pretrain", "model.txt");
    m.input("scorer", "head.txt");
    m.input("dpo", "policy.txt");
    m.output("report.json");
    m.save();
    return report;
}

eval::EvalReport run_pipeline(const RunContext& ctx) {
    run_pretrain(ctx);
    run_train_scorer(ctx);
    run_gen_pairs(ctx);
    run_dpo_train(ctx);
    return run_eval(ctx);
}

}  // namespace flowpref::cli
