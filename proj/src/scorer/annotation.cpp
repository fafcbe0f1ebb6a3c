// SPDX-License-Identifier: Apache-2.0
#include "flowpref/scorer/annotation.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/parallel.hpp"
#include "flowpref/flow/sampler.hpp"

namespace flowpref::scorer {

double UtilityOracle::utility(const ScoreVector& s) const {
    const auto z = reference.apply(s);
    return weights[0] * z[0] + weights[1] * z[1] - weights[2] * z[2] + weights[3] * z[3] + weights[4] * z[4];
}

double UtilityOracle::noisy_utility(const ScoreVector& s, Rng& rng) const {
    const double u = utility(s);
    if (noise_std == 0.0) {
        return u;
    }
    return u + noise_std * std::normal_distribution<double>(0.0, 1.0)(rng);
}

std::vector<AnnotatedSample> annotate_by_tertiles(std::span<const ScoreVector> pool, const UtilityOracle& oracle,
                                                  Rng& rng) {
    std::vector<double> u(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        u[i] = oracle.noisy_utility(pool[i], rng);
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

    const std::size_t n = pool.size();
    std::vector<AnnotatedSample> out(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t i = order[rank];
        out[i].scores = pool[i];
        if (3 * rank < n) {
            out[i].label = Grade::good;
        } else if (3 * rank < 2 * n) {
            out[i].label = Grade::medium;
        } else {
            out[i].label = Grade::bad;
        }
    }
    return out;
}

std::vector<ScoreVector> generate_score_pool(const flow::VelocityModel& model, const ScoreExtractor& extractor,
                                             const PoolConfig& cfg) {
    const auto conds = flow::draw_conditions(model.num_classes(), cfg.num_prompts, cfg.text_prob,
                                             derive_seed(cfg.seed, {seed_domain::prompts}));
    const std::size_t per_prompt = cfg.gammas.size();
    std::vector<ScoreVector> pool(cfg.num_prompts * per_prompt);
    parallel_for(cfg.num_prompts, cfg.threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < per_prompt; ++j) {
            Rng rng(derive_seed(cfg.seed, {i, j}));
            const Vec x = flow::sample(model, conds[i], cfg.gammas[j], cfg.n_steps, rng);
            pool[i * per_prompt + j] = extractor.extract(x, conds[i]);
        }
    });
    return pool;
}

void write_annotations(std::ostream& out, std::span<const AnnotatedSample> data) {
    for (const auto& s : data) {
        nlohmann::json j;
        j["scores"] = s.scores.values;
        j["text"] = s.scores.text_present;
        j["label"] = std::string(grade_name(s.label));
        out << j.dump() << '\n';
    }
}

std::vector<AnnotatedSample> read_annotations(std::istream& in) {
    std::vector<AnnotatedSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            AnnotatedSample s;
            const auto scores = j.at("scores").get<std::vector<double>>();
            if (scores.size() != kNumScores) {
                throw ParseError(line_no, "expected 5 scores");
            }
            std::copy(scores.begin(), scores.end(), s.scores.values.begin());
            s.scores.text_present = j.at("text").get<bool>();
            s.label = parse_grade(j.at("label").get<std::string>());
            out.push_back(s);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, std::string("malformed annotation record: ") + e.what());
        }
    }
    return out;
}

}  // namespace flowpref::scorer
