// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/pairgen/pairs.hpp"
#include "flowpref/scorer/annotation.hpp"
#include "flowpref/scorer/extractor.hpp"
#include "flowpref/scorer/head.hpp"

namespace flowpref::pairgen {

/// Everything needed to regenerate the automatic pairs.
struct DatasetHeader {
    std::string model_id;
    std::string head_id;
    std::string extractor = "toy";
    std::size_t num_candidates = 5;
    double gamma = 4.5;
    std::size_t n_steps = 50;
    std::uint64_t seed = 0;
    double min_gap = 0.05;
    std::size_t num_prompts = 0;
    std::uint64_t prompt_seed = 0;
    double text_prob = 0.0;
    std::size_t rejected_prompts = 0;
    std::size_t filtered_pairs = 0;
    std::size_t auto_pairs = 0;
    std::size_t human_pairs = 0;

    bool operator==(const DatasetHeader&) const = default;
};

struct PairDataset {
    DatasetHeader header;
    std::vector<PreferencePair> pairs;
    /// Prompts whose Good and Bad argmax coincided. Not serialized.
    std::vector<std::size_t> rejected;
};

struct PairGenConfig {
    std::size_t num_candidates = 5;
    double gamma = 4.5;
    std::size_t n_steps = 50;
    double min_gap = 0.05;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

/// Per prompt i (seed derive_seed(cfg.seed, {i})): generate candidates,
/// extract scores, score with the head, select the pair and compute its
/// complexity. Then refilter and append `human_pairs` (which keep their
/// forced zero complexity). Rejected prompts are recorded, not fatal.
PairDataset build_dataset(const flow::VelocityModel& model, const scorer::ScoreHead& head,
                          const scorer::ScoreExtractor& extractor, std::span<const flow::Condition> conds,
                          const PairGenConfig& cfg, std::span<const PreferencePair> human_pairs = {});

/// Stand-in for human annotation: two samples per prompt, the one with the
/// higher noisy ground-truth utility wins. p_w/p_l are the head's
/// probabilities (informational); score_c is 0.
std::vector<PreferencePair> synthesize_human_pairs(const flow::VelocityModel& model,
                                                   const scorer::ScoreHead& head,
                                                   const scorer::ScoreExtractor& extractor,
                                                   const scorer::UtilityOracle& oracle,
                                                   std::span<const flow::Condition> conds, double gamma,
                                                   std::size_t n_steps, std::uint64_t seed,
                                                   std::size_t threads = 1);

/// Line-delimited JSON. The first line is the header object
/// {"type":"header",...}; every further line is one pair:
///   {"type":"pair","class_id":k,"text":b,"winner":[..],"loser":[..],
///    "p_w":[g,m,b],"p_l":[g,m,b],"score_c":x,"origin":"auto"|"human",
///    "prompt":i,"winner_index":a,"loser_index":b}
void write_dataset(std::ostream& out, const PairDataset& ds);
PairDataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const PairDataset& ds);
PairDataset load_dataset(const std::string& path);

void write_pairs(std::ostream& out, std::span<const PreferencePair> pairs);

/// Loads pair records as human pairs: origin forced to human and score_c to
/// 0 whatever the file says. Header lines are skipped. Throws IoError if the
/// file cannot be read, ParseError naming the line for a malformed record.
std::vector<PreferencePair> ingest_human(const std::string& path);

}  // namespace flowpref::pairgen
