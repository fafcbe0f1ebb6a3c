// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and independent oracles. Nothing here calls the library
// routine it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "flowpref/common/rng.hpp"
#include "flowpref/flow/toy_task.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/nn/mlp.hpp"

namespace testing {

using flowpref::Rng;
using flowpref::Vec;

inline Vec random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Vec v(n);
    for (auto& x : v) {
        x = nd(rng);
    }
    return v;
}

/// Net with every parameter (biases too) drawn from N(0, scale^2).
inline flowpref::nn::Mlp random_mlp(std::vector<std::size_t> dims, Rng& rng, double scale = 0.5) {
    flowpref::nn::Mlp net(std::move(dims));
    std::normal_distribution<double> nd(0.0, scale);
    for (auto& p : net.params()) {
        p = nd(rng);
    }
    return net;
}

inline flowpref::flow::VelocityModel random_velocity_model(std::size_t d, std::size_t k, Rng& rng,
                                                           std::vector<std::size_t> hidden = {6},
                                                           double scale = 0.5) {
    std::vector<std::size_t> dims{d + 1 + k + 1};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(d);
    return flowpref::flow::VelocityModel(d, k, 0.1, random_mlp(dims, rng, scale));
}

/// Straight-line forward pass from the layer views, with explicit loops.
inline Vec forward_oracle(const flowpref::nn::Mlp& net, const Vec& x) {
    Vec h = x;
    const auto& dims = net.layer_dims();
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        const auto w = net.weights(k);
        const auto b = net.biases(k);
        Vec z(dims[k + 1]);
        for (std::size_t r = 0; r < dims[k + 1]; ++r) {
            double acc = b[r];
            for (std::size_t c = 0; c < dims[k]; ++c) {
                acc += w[r * dims[k] + c] * h[c];
            }
            z[r] = (k + 2 < dims.size()) ? std::max(0.0, acc) : acc;
        }
        h = std::move(z);
    }
    return h;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double sq_norm_diff(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

/// log sum_j w_j N(x; mu_j, scale_j^2 I), evaluated directly.
inline double mixture_log_density(const flowpref::flow::ToyTask& task, std::size_t k, const Vec& x) {
    double p = 0.0;
    for (const auto& c : task.mixture(k).components) {
        const double var = c.scale * c.scale;
        const double norm = std::pow(2.0 * std::numbers::pi * var, -0.5 * static_cast<double>(x.size()));
        p += c.weight * norm * std::exp(-sq_norm_diff(x, c.mean) / (2.0 * var));
    }
    return std::log(p);
}

/// Fresh scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("flowpref_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testing
