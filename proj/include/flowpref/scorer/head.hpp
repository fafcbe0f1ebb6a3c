// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowpref/common/rng.hpp"
#include "flowpref/common/text_io.hpp"
#include "flowpref/nn/mlp.hpp"
#include "flowpref/scorer/scores.hpp"

namespace flowpref::scorer {

/// Per-entry standardization fitted on training scores. The text score is
/// fitted over text-present samples only and maps to exactly 0 when a
/// sample has no text.
struct ScoreNormalizer {
    std::array<double, kNumScores> mean{0, 0, 0, 0, 0};
    std::array<double, kNumScores> stddev{1, 1, 1, 1, 1};

    static ScoreNormalizer fit(std::span<const ScoreVector> scores);
    std::array<double, kNumScores> apply(const ScoreVector& s) const;

    bool operator==(const ScoreNormalizer&) const = default;
};

/// 5 -> hidden -> 3 MLP with ReLU, followed by softmax.
struct ScoreHead {
    nn::Mlp net;
    ScoreNormalizer normalizer;

    bool operator==(const ScoreHead&) const = default;
};

struct AnnotatedSample {
    ScoreVector scores;
    Grade label = Grade::medium;

    bool operator==(const AnnotatedSample&) const = default;
};

/// softmax(net(normalize(scores))). Throws InputError on non-finite scores.
ProbTriple score_probs(const ScoreHead& head, const ScoreVector& scores);

/// Index of the largest probability; ties go to the lower index
/// (Good before Medium before Bad).
Grade predicted_grade(const ProbTriple& p);

/// Fraction of samples whose predicted_grade equals the label.
double head_accuracy(const ScoreHead& head, std::span<const AnnotatedSample> data);

/// Mean cross entropy over `batch`; accumulates its parameter gradient into
/// `grad` when non-empty.
double head_ce_loss(const ScoreHead& head, std::span<const AnnotatedSample> batch, std::span<double> grad = {});

struct HeadTrainConfig {
    std::size_t hidden = 32;
    std::size_t steps = 2000;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::size_t warmup_steps = 0;
    double weight_decay = 0.0;
    /// Share of samples held out for validation accuracy.
    double val_fraction = 0.2;
    std::uint64_t seed = 1;
};

struct HeadTrainResult {
    ScoreHead head;
    double train_accuracy = 0.0;
    /// NaN when the validation split is empty.
    double val_accuracy = 0.0;
    std::size_t train_size = 0;
    std::size_t val_size = 0;
};

/// Parameters a zero-step run returns: Xavier init from the config seed.
nn::Mlp initial_head_net(const HeadTrainConfig& cfg);

/// Minimizes mean cross entropy with AdamW on minibatches drawn with
/// replacement. Throws InputError if any of the three grades is absent.
HeadTrainResult train_head(std::span<const AnnotatedSample> data, const HeadTrainConfig& cfg);

/// Head checkpoint: `score_head 1`, `norm_mean`/`norm_std` lines with five
/// values each, then the Mlp block.
void write_head(std::ostream& out, const ScoreHead& head);
ScoreHead read_head(LineReader& in);
void save_head(const std::string& path, const ScoreHead& head);
ScoreHead load_head(const std::string& path);
std::string head_checkpoint_id(const ScoreHead& head);

}  // namespace flowpref::scorer
