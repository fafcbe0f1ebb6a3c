// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/toy_task.hpp"
#include "flowpref/scorer/scores.hpp"

namespace flowpref::scorer {

/// Maps a generated sample and its condition to a ScoreVector. Extractors are
/// stateless after construction, so extract() may run concurrently.
class ScoreExtractor {
public:
    virtual ~ScoreExtractor() = default;
    virtual std::string_view name() const = 0;
    virtual ScoreVector extract(std::span<const double> sample, const flow::Condition& cond) const = 0;
};

struct ToyExtractorParams {
    /// Length scale of the class-consistency score.
    double tau = 4.0;
    /// Length scale of the text channel along the class's radial direction.
    double text_tau = 1.0;
    /// Entries of |x| beyond this bound are penalized by the last score.
    double clip_bound = 3.0;
};

/// Closed-form scores against a ToyTask. With c the class centroid, mu_j the
/// class component means and r the unit vector along c:
///   s1 = exp(-||x - c||^2 / tau)
///   s2 = s1 * exp(-(r . (x - c))^2 / text_tau)    (0 without text)
///   s3 = min_j ||x - mu_j||
///   s4 = exp(log p_class(x) / d)
///   s5 = 1 / (1 + max(0, ||x||_inf - clip_bound))
class ToyExtractor final : public ScoreExtractor {
public:
    ToyExtractor(const flow::ToyTask& task, ToyExtractorParams params = {});

    std::string_view name() const override { return "toy"; }
    ScoreVector extract(std::span<const double> sample, const flow::Condition& cond) const override;

    const ToyExtractorParams& params() const noexcept { return params_; }

private:
    flow::ToyTask task_;
    ToyExtractorParams params_;
    std::vector<Vec> centroids_;
    std::vector<Vec> radial_;
};

/// Registered extractor names: "toy". Anything else throws ConfigError.
std::unique_ptr<ScoreExtractor> make_extractor(std::string_view name, const flow::ToyTask& task,
                                               const ToyExtractorParams& params = {});

}  // namespace flowpref::scorer
