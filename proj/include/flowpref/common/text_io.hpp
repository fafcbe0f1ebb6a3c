// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowpref {

/// Shortest decimal representation that parses back to the same bits.
std::string format_double(double v);
double parse_double(std::string_view token, std::size_t line);
std::uint64_t parse_uint(std::string_view token, std::size_t line);

std::vector<std::string_view> split_ws(std::string_view line);

/// Reads lines and tracks the 1-based number of the last line returned.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next line, skipping blank lines and `#` comments. False at EOF.
    bool next(std::string& line);
    /// Like next() but throws ParseError naming `expected` at EOF.
    std::string expect(std::string_view expected);
    std::size_t line_number() const noexcept { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

/// FNV-1a, used for content-addressed checkpoint ids.
std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex_id(std::uint64_t h);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace flowpref
