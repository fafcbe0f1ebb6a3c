// SPDX-License-Identifier: Apache-2.0
#include "flowpref/scorer/head.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "flowpref/common/errors.hpp"
#include "flowpref/nn/adamw.hpp"
#include "flowpref/nn/checkpoint.hpp"
#include "flowpref/nn/losses.hpp"

namespace flowpref::scorer {

ScoreNormalizer ScoreNormalizer::fit(std::span<const ScoreVector> scores) {
    ScoreNormalizer norm;
    for (std::size_t i = 0; i < kNumScores; ++i) {
        double sum = 0.0;
        double sq = 0.0;
        std::size_t n = 0;
        for (const auto& s : scores) {
            if (i == 1 && !s.text_present) {
                continue;
            }
            sum += s.values[i];
            sq += s.values[i] * s.values[i];
            ++n;
        }
        if (n == 0) {
            continue;
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sq / static_cast<double>(n) - mean * mean);
        norm.mean[i] = mean;
        norm.stddev[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return norm;
}

std::array<double, kNumScores> ScoreNormalizer::apply(const ScoreVector& s) const {
    std::array<double, kNumScores> z{};
    for (std::size_t i = 0; i < kNumScores; ++i) {
        z[i] = (s.values[i] - mean[i]) / stddev[i];
    }
    if (!s.text_present) {
        z[1] = 0.0;
    }
    return z;
}

namespace {

void require_finite_scores(const ScoreVector& s) {
    for (double v : s.values) {
        if (!std::isfinite(v)) {
            throw InputError("score vector contains a non-finite entry");
        }
    }
}

ProbTriple to_triple(const Vec& p) { return ProbTriple{p[0], p[1], p[2]}; }

}  // namespace

ProbTriple score_probs(const ScoreHead& head, const ScoreVector& scores) {
    require_finite_scores(scores);
    const auto z = head.normalizer.apply(scores);
    return to_triple(nn::softmax(head.net.forward(z)));
}

Grade predicted_grade(const ProbTriple& p) {
    const auto a = p.as_array();
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (a[i] > a[best]) {
            best = i;
        }
    }
    return static_cast<Grade>(best);
}

double head_accuracy(const ScoreHead& head, std::span<const AnnotatedSample> data) {
    if (data.empty()) {
        throw InputError("head_accuracy: empty data");
    }
    std::size_t hits = 0;
    for (const auto& s : data) {
        hits += predicted_grade(score_probs(head, s.scores)) == s.label ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

double head_ce_loss(const ScoreHead& head, std::span<const AnnotatedSample> batch, std::span<double> grad) {
    if (batch.empty()) {
        throw InputError("head_ce_loss: empty batch");
    }
    const bool want_grad = !grad.empty();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& s : batch) {
        require_finite_scores(s.scores);
        const auto z = head.normalizer.apply(s.scores);
        const auto label = static_cast<std::size_t>(s.label);
        if (!want_grad) {
            total += nn::cross_entropy(nn::softmax(head.net.forward(z)), label);
            continue;
        }
        const auto trace = head.net.forward_trace(z);
        const Vec probs = nn::softmax(trace.output());
        total += nn::cross_entropy(probs, label);
        Vec upstream = nn::softmax_cross_entropy_grad(probs, label);
        for (double& g : upstream) {
            g *= inv_n;
        }
        head.net.backward(trace, upstream, grad);
    }
    return total * inv_n;
}

nn::Mlp initial_head_net(const HeadTrainConfig& cfg) {
    if (cfg.hidden == 0) {
        throw InputError("score head hidden width must be positive");
    }
    Rng rng(derive_seed(cfg.seed, {1}));
    return nn::Mlp::xavier_uniform({kNumScores, cfg.hidden, kNumGrades}, rng);
}

HeadTrainResult train_head(std::span<const AnnotatedSample> data, const HeadTrainConfig& cfg) {
    std::array<std::size_t, kNumGrades> counts{};
    for (const auto& s : data) {
        counts.at(static_cast<std::size_t>(s.label)) += 1;
    }
    for (std::size_t g = 0; g < kNumGrades; ++g) {
        if (counts[g] == 0) {
            throw InputError("train_head: no samples labelled " +
                             std::string(grade_name(static_cast<Grade>(g))));
        }
    }
    if (!(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0) || cfg.batch_size == 0) {
        throw InputError("train_head: val_fraction must be in [0, 1) and batch_size positive");
    }

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(cfg.seed, {0}));
    std::shuffle(order.begin(), order.end(), split_rng);
    const auto n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(data.size()));
    std::vector<AnnotatedSample> val;
    std::vector<AnnotatedSample> train;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_val ? val : train).push_back(data[order[i]]);
    }
    if (train.empty()) {
        throw InputError("train_head: validation split leaves no training samples");
    }

    std::vector<ScoreVector> train_scores;
    train_scores.reserve(train.size());
    for (const auto& s : train) {
        train_scores.push_back(s.scores);
    }
    ScoreHead head{initial_head_net(cfg), ScoreNormalizer::fit(train_scores)};

    nn::AdamW opt(head.net.num_params(), nn::AdamWConfig{.base_lr = cfg.lr, .warmup_steps = cfg.warmup_steps,
                                                         .weight_decay = cfg.weight_decay});
    Rng batch_rng(derive_seed(cfg.seed, {2}));
    std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
    std::vector<AnnotatedSample> batch(std::min(cfg.batch_size, train.size()));
    Vec grad(head.net.num_params());
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        for (auto& b : batch) {
            b = train[pick(batch_rng)];
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        head_ce_loss(head, batch, grad);
        opt.step(head.net.params(), grad);
    }

    HeadTrainResult result;
    result.head = std::move(head);
    result.train_accuracy = head_accuracy(result.head, train);
    result.val_accuracy =
        val.empty() ? std::numeric_limits<double>::quiet_NaN() : head_accuracy(result.head, val);
    result.train_size = train.size();
    result.val_size = val.size();
    return result;
}

namespace {

void write_array(std::ostream& out, const char* key, const std::array<double, kNumScores>& a) {
    out << key;
    for (double v : a) {
        out << ' ' << format_double(v);
    }
    out << '\n';
}

std::array<double, kNumScores> read_array(LineReader& in, std::string_view key) {
    const std::string line = in.expect(key);
    const auto tokens = split_ws(line);
    if (tokens.size() != kNumScores + 1 || tokens[0] != key) {
        throw ParseError(in.line_number(), "expected '" + std::string(key) + "' with 5 values");
    }
    std::array<double, kNumScores> a{};
    for (std::size_t i = 0; i < kNumScores; ++i) {
        a[i] = parse_double(tokens[i + 1], in.line_number());
    }
    return a;
}

}  // namespace

void write_head(std::ostream& out, const ScoreHead& head) {
    out << "score_head 1\n";
    write_array(out, "norm_mean", head.normalizer.mean);
    write_array(out, "norm_std", head.normalizer.stddev);
    nn::write_mlp(out, head.net);
}

ScoreHead read_head(LineReader& in) {
    const std::string line = in.expect("score_head header");
    if (split_ws(line) != std::vector<std::string_view>{"score_head", "1"}) {
        throw ParseError(in.line_number(), "not a score_head v1 checkpoint");
    }
    ScoreHead head;
    head.normalizer.mean = read_array(in, "norm_mean");
    head.normalizer.stddev = read_array(in, "norm_std");
    for (double s : head.normalizer.stddev) {
        if (!(s > 0.0)) {
            throw ParseError(in.line_number(), "norm_std entries must be positive");
        }
    }
    head.net = nn::read_mlp(in);
    if (head.net.input_dim() != kNumScores || head.net.output_dim() != kNumGrades) {
        throw ParseError(in.line_number(), "score head must map 5 scores to 3 grades");
    }
    return head;
}

void save_head(const std::string& path, const ScoreHead& head) {
    std::ostringstream out;
    write_head(out, head);
    write_file(path, out.str());
}

ScoreHead load_head(const std::string& path) {
    std::istringstream in(read_file(path));
    LineReader reader(in);
    return read_head(reader);
}

std::string head_checkpoint_id(const ScoreHead& head) {
    std::ostringstream out;
    write_head(out, head);
    return hex_id(fnv1a(out.str()));
}

}  // namespace flowpref::scorer
