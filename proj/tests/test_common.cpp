// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <atomic>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "flowpref/common/errors.hpp"
#include "flowpref/common/parallel.hpp"
#include "flowpref/common/rng.hpp"
#include "flowpref/common/text_io.hpp"
#include "support.hpp"

using namespace flowpref;

TEST_CASE("derive_seed is a pure function of base and path") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    CHECK(derive_seed(1, {0}) != derive_seed(1, {0, 0}));
}

TEST_CASE("format_double round-trips bit-exactly") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(testing::random_vec(rng, 1)[0], static_cast<int>(i % 80) - 40);
        CHECK(parse_double(format_double(v), 1) == v);
    }
    CHECK(parse_double(format_double(0.1), 1) == 0.1);
    CHECK(parse_double(format_double(-0.0), 1) == 0.0);
}

TEST_CASE("number parsing reports the line") {
    try {
        parse_double("1.5x", 17);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 17);
    }
    CHECK_THROWS_AS(parse_uint("-3", 2), ParseError);
    CHECK(parse_uint("42", 1) == 42);
}

TEST_CASE("LineReader skips blanks and comments and counts lines") {
    std::istringstream in("# header\n\nalpha\n  \nbeta\n");
    LineReader r(in);
    std::string line;
    REQUIRE(r.next(line));
    CHECK(line == "alpha");
    CHECK(r.line_number() == 3);
    CHECK(r.expect("beta") == "beta");
    CHECK(r.line_number() == 5);
    CHECK_FALSE(r.next(line));
    CHECK_THROWS_AS(r.expect("gamma"), ParseError);
}

TEST_CASE("fnv1a matches the published 64-bit test vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex_id(0xabcULL) == "0000000000000abc");
}

TEST_CASE("parallel_for output does not depend on the thread count") {
    auto run = [](std::size_t threads) {
        std::vector<double> out(97);
        parallel_for(out.size(), threads, [&](std::size_t i) {
            Rng rng(derive_seed(3, {i}));
            out[i] = testing::random_vec(rng, 1)[0];
        });
        return out;
    };
    const auto one = run(1);
    CHECK(run(3) == one);
    CHECK(run(8) == one);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
    CHECK_THROWS_AS(parallel_for(10, 4,
                                 [](std::size_t i) {
                                     if (i == 7) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
    std::atomic<int> calls{0};
    parallel_for(0, 4, [&](std::size_t) { ++calls; });
    CHECK(calls == 0);
}

TEST_CASE("file helpers surface I/O failures") {
    CHECK_THROWS_AS(read_file("/nonexistent/dir/file.txt"), IoError);
    testing::TempDir dir("io");
    write_file(dir.file("x.txt"), "hello\n");
    CHECK(read_file(dir.file("x.txt")) == "hello\n");
}
