// SPDX-License-Identifier: Apache-2.0
#include "flowpref/common/rng.hpp"

namespace flowpref {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(base);
    for (std::uint64_t id : path) {
        h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
    }
    return h;
}

double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Vec standard_normal(Rng& rng, std::size_t n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec out(n);
    for (auto& v : out) {
        v = normal(rng);
    }
    return out;
}

}  // namespace flowpref
