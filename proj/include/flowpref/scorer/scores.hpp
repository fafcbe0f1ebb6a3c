// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace flowpref::scorer {

inline constexpr std::size_t kNumScores = 5;
inline constexpr std::size_t kNumGrades = 3;

/// The five metric scores of one sample:
///   [0] semantic consistency with the class condition (higher is better)
///   [1] semantic consistency with the text condition, 0 when no text
///   [2] desync analogue, non-negative, lower is better
///   [3] quality analogue, positive, higher is better
///   [4] bounded quality analogue in (0, 1], higher is better
struct ScoreVector {
    std::array<double, kNumScores> values{};
    bool text_present = false;

    bool operator==(const ScoreVector&) const = default;
};

enum class Grade : std::size_t { good = 0, medium = 1, bad = 2 };

std::string_view grade_name(Grade g);
/// Accepts "Good", "Medium", "Bad". Throws InputError otherwise.
Grade parse_grade(std::string_view name);

/// (Good, Medium, Bad) probabilities.
struct ProbTriple {
    double good = 0.0;
    double medium = 0.0;
    double bad = 0.0;

    std::array<double, kNumGrades> as_array() const { return {good, medium, bad}; }
    bool operator==(const ProbTriple&) const = default;
};

/// True when every entry is in [0, 1] and the sum is 1 within `tol`.
bool is_valid(const ProbTriple& p, double tol = 1e-9);

}  // namespace flowpref::scorer
