// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace flowpref {

using Vec = std::vector<double>;
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic child seed from a base seed and a path of integer ids, e.g.
/// derive_seed(base, {prompt_index, candidate_index}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// Seed-domain tags so that different pipeline stages never share streams.
namespace seed_domain {
inline constexpr std::uint64_t pretrain = 0x70726574;
inline constexpr std::uint64_t annotate = 0x616e6e6f;
inline constexpr std::uint64_t head = 0x68656164;
inline constexpr std::uint64_t pairs = 0x70616972;
inline constexpr std::uint64_t human = 0x68756d61;
inline constexpr std::uint64_t dpo = 0x64706f00;
inline constexpr std::uint64_t eval = 0x6576616c;
inline constexpr std::uint64_t prompts = 0x70726f6d;
}  // namespace seed_domain

double uniform01(Rng& rng);
Vec standard_normal(Rng& rng, std::size_t n);

}  // namespace flowpref
