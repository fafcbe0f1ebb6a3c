// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flowpref/common/rng.hpp"

namespace flowpref::flow {

/// Isotropic Gaussian component: N(mean, scale^2 I).
struct MixtureComponent {
    Vec mean;
    double scale = 1.0;
    double weight = 1.0;
};

struct ClassMixture {
    std::vector<MixtureComponent> components;
};

/// Generator for the default synthetic task.
struct ToyTaskSpec {
    std::size_t dim = 8;
    std::size_t num_classes = 4;
    std::size_t components_per_class = 2;
    /// Distance of each class centroid from the origin.
    double class_radius = 3.0;
    /// Distance of each component mean from its class centroid.
    double component_offset = 1.0;
    double component_scale = 0.35;
    std::uint64_t seed = 7;
};

/// K classes, each with a Gaussian-mixture target distribution in R^d.
class ToyTask {
public:
    /// Validates: at least one class, every mean of length `dim`, positive
    /// scales, weights summing to 1 (within 1e-9) per class.
    ToyTask(std::size_t dim, std::vector<ClassMixture> classes);

    static ToyTask generate(const ToyTaskSpec& spec);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t num_classes() const noexcept { return classes_.size(); }
    const ClassMixture& mixture(std::size_t class_id) const;

    /// Weighted mean of the class's component means.
    Vec centroid(std::size_t class_id) const;
    Vec sample(std::size_t class_id, Rng& rng) const;
    double log_density(std::size_t class_id, std::span<const double> x) const;

private:
    std::size_t dim_;
    std::vector<ClassMixture> classes_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace flowpref::flow
