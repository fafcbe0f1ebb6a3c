// SPDX-License-Identifier: Apache-2.0
#include "flowpref/flow/toy_task.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::flow {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InputError("squared_distance: dimension mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

ToyTask::ToyTask(std::size_t dim, std::vector<ClassMixture> classes) : dim_(dim), classes_(std::move(classes)) {
    if (dim_ == 0 || classes_.empty()) {
        throw InputError("ToyTask: need a positive dimension and at least one class");
    }
    for (std::size_t k = 0; k < classes_.size(); ++k) {
        const auto& comps = classes_[k].components;
        if (comps.empty()) {
            throw InputError("ToyTask: class " + std::to_string(k) + " has no components");
        }
        double total = 0.0;
        for (const auto& c : comps) {
            if (c.mean.size() != dim_ || !(c.scale > 0.0) || c.weight < 0.0) {
                throw InputError("ToyTask: class " + std::to_string(k) +
                                 " has a component with a bad mean length, scale or weight");
            }
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw InputError("ToyTask: mixture weights of class " + std::to_string(k) + " do not sum to 1");
        }
    }
}

namespace {

Vec random_unit(Rng& rng, std::size_t dim) {
    for (;;) {
        Vec v = standard_normal(rng, dim);
        double norm = 0.0;
        for (double x : v) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm > 1e-8) {
            for (double& x : v) {
                x /= norm;
            }
            return v;
        }
    }
}

}  // namespace

ToyTask ToyTask::generate(const ToyTaskSpec& spec) {
    if (spec.num_classes == 0 || spec.components_per_class == 0 || spec.dim == 0) {
        throw InputError("ToyTaskSpec: dim, num_classes and components_per_class must be positive");
    }
    Rng rng(spec.seed);
    std::vector<ClassMixture> classes(spec.num_classes);
    const double weight = 1.0 / static_cast<double>(spec.components_per_class);
    for (auto& cls : classes) {
        Vec center = random_unit(rng, spec.dim);
        for (double& x : center) {
            x *= spec.class_radius;
        }
        for (std::size_t j = 0; j < spec.components_per_class; ++j) {
            Vec offset = random_unit(rng, spec.dim);
            MixtureComponent comp;
            comp.mean.resize(spec.dim);
            for (std::size_t i = 0; i < spec.dim; ++i) {
                comp.mean[i] = center[i] + spec.component_offset * offset[i];
            }
            comp.scale = spec.component_scale;
            comp.weight = weight;
            cls.components.push_back(std::move(comp));
        }
    }
    return ToyTask(spec.dim, std::move(classes));
}

const ClassMixture& ToyTask::mixture(std::size_t class_id) const {
    if (class_id >= classes_.size()) {
        throw InputError("ToyTask: class id " + std::to_string(class_id) + " out of range");
    }
    return classes_[class_id];
}

Vec ToyTask::centroid(std::size_t class_id) const {
    Vec c(dim_, 0.0);
    for (const auto& comp : mixture(class_id).components) {
        for (std::size_t i = 0; i < dim_; ++i) {
            c[i] += comp.weight * comp.mean[i];
        }
    }
    return c;
}

Vec ToyTask::sample(std::size_t class_id, Rng& rng) const {
    const auto& comps = mixture(class_id).components;
    double u = uniform01(rng);
    std::size_t pick = comps.size() - 1;
    for (std::size_t j = 0; j < comps.size(); ++j) {
        if (u < comps[j].weight) {
            pick = j;
            break;
        }
        u -= comps[j].weight;
    }
    Vec x = standard_normal(rng, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        x[i] = comps[pick].mean[i] + comps[pick].scale * x[i];
    }
    return x;
}

double ToyTask::log_density(std::size_t class_id, std::span<const double> x) const {
    if (x.size() != dim_) {
        throw InputError("ToyTask::log_density: dimension mismatch");
    }
    const auto& comps = mixture(class_id).components;
    std::vector<double> terms;
    terms.reserve(comps.size());
    const double d = static_cast<double>(dim_);
    for (const auto& c : comps) {
        if (c.weight <= 0.0) {
            continue;
        }
        const double var = c.scale * c.scale;
        terms.push_back(std::log(c.weight) - 0.5 * d * std::log(2.0 * std::numbers::pi * var) -
                        squared_distance(x, c.mean) / (2.0 * var));
    }
    const double max = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) {
        sum += std::exp(t - max);
    }
    return max + std::log(sum);
}

}  // namespace flowpref::flow
