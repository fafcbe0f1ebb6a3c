// SPDX-License-Identifier: Apache-2.0
#include "flowpref/scorer/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::scorer {

std::string_view grade_name(Grade g) {
    switch (g) {
        case Grade::good:
            return "Good";
        case Grade::medium:
            return "Medium";
        case Grade::bad:
            return "Bad";
    }
    return "?";
}

Grade parse_grade(std::string_view name) {
    if (name == "Good") {
        return Grade::good;
    }
    if (name == "Medium") {
        return Grade::medium;
    }
    if (name == "Bad") {
        return Grade::bad;
    }
    throw InputError("unknown grade '" + std::string(name) + "'");
}

bool is_valid(const ProbTriple& p, double tol) {
    for (double v : p.as_array()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            return false;
        }
    }
    return std::abs(p.good + p.medium + p.bad - 1.0) <= tol;
}

ToyExtractor::ToyExtractor(const flow::ToyTask& task, ToyExtractorParams params)
    : task_(task), params_(params) {
    if (!(params_.tau > 0.0) || !(params_.text_tau > 0.0) || !(params_.clip_bound >= 0.0)) {
        throw ConfigError("toy extractor: tau and text_tau must be positive, clip_bound non-negative");
    }
    for (std::size_t k = 0; k < task_.num_classes(); ++k) {
        Vec c = task_.centroid(k);
        double norm = 0.0;
        for (double v : c) {
            norm += v * v;
        }
        norm = std::sqrt(norm);
        Vec r(c.size(), 0.0);
        if (norm > 0.0) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                r[i] = c[i] / norm;
            }
        } else {
            r[0] = 1.0;
        }
        centroids_.push_back(std::move(c));
        radial_.push_back(std::move(r));
    }
}

ScoreVector ToyExtractor::extract(std::span<const double> x, const flow::Condition& cond) const {
    if (x.size() != task_.dim()) {
        throw InputError("toy extractor: sample has the wrong dimension");
    }
    if (cond.class_id >= task_.num_classes()) {
        throw InputError("toy extractor: class id out of range");
    }
    const Vec& c = centroids_[cond.class_id];
    const Vec& r = radial_[cond.class_id];
    ScoreVector s;
    s.text_present = cond.text_present;

    const double s1 = std::exp(-flow::squared_distance(x, c) / params_.tau);
    s.values[0] = s1;

    if (cond.text_present) {
        double along = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            along += r[i] * (x[i] - c[i]);
        }
        s.values[1] = s1 * std::exp(-along * along / params_.text_tau);
    }

    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& comp : task_.mixture(cond.class_id).components) {
        nearest = std::min(nearest, flow::squared_distance(x, comp.mean));
    }
    s.values[2] = std::sqrt(nearest);

    s.values[3] = std::exp(task_.log_density(cond.class_id, x) / static_cast<double>(task_.dim()));

    double inf_norm = 0.0;
    for (double v : x) {
        inf_norm = std::max(inf_norm, std::abs(v));
    }
    s.values[4] = 1.0 / (1.0 + std::max(0.0, inf_norm - params_.clip_bound));
    return s;
}

std::unique_ptr<ScoreExtractor> make_extractor(std::string_view name, const flow::ToyTask& task,
                                               const ToyExtractorParams& params) {
    if (name == "toy") {
        return std::make_unique<ToyExtractor>(task, params);
    }
    throw ConfigError("unknown score extractor '" + std::string(name) + "' (registered: toy)");
}

}  // namespace flowpref::scorer
