// SPDX-License-Identifier: Apache-2.0
#include "flowpref/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/parallel.hpp"
#include "flowpref/flow/sampler.hpp"
#include "flowpref/flow/toy_task.hpp"

namespace flowpref::eval {

namespace {

double mean_pairwise_distance(std::span<const Vec> a, std::span<const Vec> b) {
    double total = 0.0;
    for (const auto& x : a) {
        for (const auto& y : b) {
            total += std::sqrt(flow::squared_distance(x, y));
        }
    }
    return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

double energy_distance(std::span<const Vec> generated, std::span<const Vec> target) {
    if (generated.empty() || target.empty()) {
        throw InputError("energy_distance: both sample sets must be non-empty");
    }
    const std::size_t d = generated.front().size();
    for (const auto& v : generated) {
        if (v.size() != d) {
            throw InputError("energy_distance: dimension mismatch");
        }
    }
    for (const auto& v : target) {
        if (v.size() != d) {
            throw InputError("energy_distance: dimension mismatch");
        }
    }
    return 2.0 * mean_pairwise_distance(generated, target) - mean_pairwise_distance(generated, generated) -
           mean_pairwise_distance(target, target);
}

std::vector<Vec> sample_prompts(const flow::VelocityModel& model, std::span<const flow::Condition> conds,
                                const SamplingSettings& settings) {
    std::vector<Vec> out(conds.size());
    parallel_for(conds.size(), settings.threads, [&](std::size_t i) {
        Rng rng(derive_seed(settings.seed, {i}));
        out[i] = flow::sample(model, conds[i], settings.gamma, settings.n_steps, rng);
    });
    return out;
}

GoodProb good_probs(std::span<const Vec> samples, std::span<const flow::Condition> conds,
                    const scorer::ScoreHead& head, const scorer::ScoreExtractor& extractor) {
    if (samples.size() != conds.size()) {
        throw InputError("good_probs: one sample per prompt expected");
    }
    GoodProb out;
    out.per_prompt.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.per_prompt.push_back(scorer::score_probs(head, extractor.extract(samples[i], conds[i])).good);
    }
    out.mean = mean(out.per_prompt);
    return out;
}

GoodProb mean_good_prob(const flow::VelocityModel& model, const scorer::ScoreHead& head,
                        const scorer::ScoreExtractor& extractor, std::span<const flow::Condition> conds,
                        const SamplingSettings& settings) {
    const auto samples = sample_prompts(model, conds, settings);
    return good_probs(samples, conds, head, extractor);
}

WinRate win_rate_from(std::span<const double> policy_good, std::span<const double> reference_good) {
    if (policy_good.size() != reference_good.size() || policy_good.empty()) {
        throw InputError("win_rate: need matching, non-empty per-prompt scores");
    }
    WinRate out;
    out.policy_good.assign(policy_good.begin(), policy_good.end());
    out.reference_good.assign(reference_good.begin(), reference_good.end());
    out.outcomes.reserve(policy_good.size());
    for (std::size_t i = 0; i < policy_good.size(); ++i) {
        const double p = policy_good[i];
        const double r = reference_good[i];
        out.outcomes.push_back(p > r ? 1.0 : (p == r ? 0.5 : 0.0));
    }
    out.win_rate = mean(out.outcomes);
    return out;
}

WinRate win_rate(const flow::VelocityModel& policy, const flow::VelocityModel& reference,
                 const scorer::ScoreHead& head, const scorer::ScoreExtractor& extractor,
                 std::span<const flow::Condition> conds, const SamplingSettings& settings) {
    if (!policy.same_architecture(reference)) {
        throw InputError("win_rate: policy and reference architectures differ");
    }
    const auto p = mean_good_prob(policy, head, extractor, conds, settings);
    const auto r = mean_good_prob(reference, head, extractor, conds, settings);
    return win_rate_from(p.per_prompt, r.per_prompt);
}

double bootstrap_mean_lower_bound(std::span<const double> values, double confidence, std::size_t resamples,
                                  std::uint64_t seed) {
    if (values.empty() || resamples == 0 || !(confidence > 0.0 && confidence < 1.0)) {
        throw InputError("bootstrap_mean_lower_bound: bad arguments");
    }
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(resamples);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            s += values[pick(rng)];
        }
        m = s / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const auto idx = static_cast<std::size_t>(std::floor((1.0 - confidence) * static_cast<double>(resamples)));
    return means[std::min(idx, resamples - 1)];
}

}  // namespace flowpref::eval
