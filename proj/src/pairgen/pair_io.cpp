// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/text_io.hpp"
#include "flowpref/pairgen/dataset.hpp"

namespace flowpref::pairgen {

using nlohmann::json;

namespace {

json triple_json(const scorer::ProbTriple& p) { return json::array({p.good, p.medium, p.bad}); }

scorer::ProbTriple triple_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) {
        throw InputError("probability triple needs 3 entries");
    }
    return {v[0], v[1], v[2]};
}

json pair_json(const PreferencePair& p) {
    json j;
    j["type"] = "pair";
    j["class_id"] = p.cond.class_id;
    j["text"] = p.cond.text_present;
    j["winner"] = p.winner;
    j["loser"] = p.loser;
    j["p_w"] = triple_json(p.p_w);
    j["p_l"] = triple_json(p.p_l);
    j["score_c"] = p.score_c;
    j["origin"] = std::string(origin_name(p.origin));
    j["prompt"] = p.prompt_index;
    j["winner_index"] = p.winner_index;
    j["loser_index"] = p.loser_index;
    return j;
}

PreferencePair pair_from(const json& j) {
    PreferencePair p;
    p.cond.class_id = j.at("class_id").get<std::size_t>();
    p.cond.text_present = j.at("text").get<bool>();
    p.winner = j.at("winner").get<Vec>();
    p.loser = j.at("loser").get<Vec>();
    if (p.winner.empty() || p.winner.size() != p.loser.size()) {
        throw InputError("winner and loser must be non-empty and of equal length");
    }
    p.p_w = triple_from(j.at("p_w"));
    p.p_l = triple_from(j.at("p_l"));
    p.score_c = j.at("score_c").get<double>();
    p.origin = parse_origin(j.at("origin").get<std::string>());
    p.prompt_index = j.value("prompt", std::size_t{0});
    p.winner_index = j.value("winner_index", std::size_t{0});
    p.loser_index = j.value("loser_index", std::size_t{0});
    return p;
}

json header_json(const DatasetHeader& h) {
    json j;
    j["type"] = "header";
    j["model_id"] = h.model_id;
    j["head_id"] = h.head_id;
    j["extractor"] = h.extractor;
    j["num_candidates"] = h.num_candidates;
    j["gamma"] = h.gamma;
    j["n_steps"] = h.n_steps;
    j["seed"] = h.seed;
    j["min_gap"] = h.min_gap;
    j["num_prompts"] = h.num_prompts;
    j["prompt_seed"] = h.prompt_seed;
    j["text_prob"] = h.text_prob;
    j["rejected_prompts"] = h.rejected_prompts;
    j["filtered_pairs"] = h.filtered_pairs;
    j["auto_pairs"] = h.auto_pairs;
    j["human_pairs"] = h.human_pairs;
    return j;
}

DatasetHeader header_from(const json& j) {
    DatasetHeader h;
    h.model_id = j.at("model_id").get<std::string>();
    h.head_id = j.at("head_id").get<std::string>();
    h.extractor = j.at("extractor").get<std::string>();
    h.num_candidates = j.at("num_candidates").get<std::size_t>();
    h.gamma = j.at("gamma").get<double>();
    h.n_steps = j.at("n_steps").get<std::size_t>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.min_gap = j.at("min_gap").get<double>();
    h.num_prompts = j.at("num_prompts").get<std::size_t>();
    h.prompt_seed = j.at("prompt_seed").get<std::uint64_t>();
    h.text_prob = j.at("text_prob").get<double>();
    h.rejected_prompts = j.at("rejected_prompts").get<std::size_t>();
    h.filtered_pairs = j.at("filtered_pairs").get<std::size_t>();
    h.auto_pairs = j.at("auto_pairs").get<std::size_t>();
    h.human_pairs = j.at("human_pairs").get<std::size_t>();
    return h;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

template <class OnRecord>
void for_each_record(std::istream& in, OnRecord&& on_record) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        try {
            const json j = json::parse(line);
            on_record(j, line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, std::string("malformed pair record: ") + e.what());
        }
    }
}

}  // namespace

void write_pairs(std::ostream& out, std::span<const PreferencePair> pairs) {
    for (const auto& p : pairs) {
        out << pair_json(p).dump() << '\n';
    }
}

void write_dataset(std::ostream& out, const PairDataset& ds) {
    out << header_json(ds.header).dump() << '\n';
    write_pairs(out, ds.pairs);
}

PairDataset read_dataset(std::istream& in) {
    PairDataset ds;
    bool have_header = false;
    for_each_record(in, [&](const json& j, std::size_t line_no) {
        const auto type = j.at("type").get<std::string>();
        if (type == "header") {
            if (have_header) {
                throw ParseError(line_no, "duplicate header");
            }
            ds.header = header_from(j);
            have_header = true;
        } else if (type == "pair") {
            ds.pairs.push_back(pair_from(j));
        } else {
            throw ParseError(line_no, "unknown record type '" + type + "'");
        }
    });
    if (!have_header) {
        throw ParseError(1, "pair dataset has no header line");
    }
    return ds;
}

void save_dataset(const std::string& path, const PairDataset& ds) {
    std::ostringstream out;
    write_dataset(out, ds);
    write_file(path, out.str());
}

PairDataset load_dataset(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_dataset(in);
}

std::vector<PreferencePair> ingest_human(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read human pair file '" + path + "'");
    }
    std::vector<PreferencePair> out;
    for_each_record(in, [&](const json& j, std::size_t line_no) {
        const auto type = j.value("type", std::string("pair"));
        if (type == "header") {
            return;
        }
        if (type != "pair") {
            throw ParseError(line_no, "unknown record type '" + type + "'");
        }
        PreferencePair p = pair_from(j);
        p.origin = Origin::human;
        p.score_c = 0.0;
        out.push_back(std::move(p));
    });
    return out;
}

}  // namespace flowpref::pairgen
