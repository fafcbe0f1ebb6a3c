// SPDX-License-Identifier: Apache-2.0
#include "flowpref/nn/checkpoint.hpp"

#include <ostream>
#include <string>

#include "flowpref/common/errors.hpp"

namespace flowpref::nn {

namespace {

void write_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << format_double(values[i]);
    }
    out << '\n';
}

void read_row(LineReader& in, std::span<double> dest, const char* what) {
    const std::string line = in.expect(what);
    const auto tokens = split_ws(line);
    if (tokens.size() != dest.size()) {
        throw ParseError(in.line_number(), std::string(what) + ": expected " + std::to_string(dest.size()) +
                                               " values, got " + std::to_string(tokens.size()));
    }
    for (std::size_t i = 0; i < dest.size(); ++i) {
        dest[i] = parse_double(tokens[i], in.line_number());
    }
}

void expect_header(LineReader& in, const std::string& line, std::string_view keyword, std::size_t layer,
                   std::initializer_list<std::size_t> shape) {
    const auto tokens = split_ws(line);
    bool ok = tokens.size() == 2 + shape.size() && tokens[0] == keyword &&
              parse_uint(tokens[1], in.line_number()) == layer;
    std::size_t i = 2;
    for (std::size_t s : shape) {
        ok = ok && parse_uint(tokens[i++], in.line_number()) == s;
    }
    if (!ok) {
        throw ParseError(in.line_number(), "malformed '" + std::string(keyword) + "' header for layer " +
                                               std::to_string(layer));
    }
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
    const auto& dims = net.layer_dims();
    out << "mlp " << dims.size();
    for (std::size_t d : dims) {
        out << ' ' << d;
    }
    out << '\n';
    for (std::size_t k = 0; k < net.num_layers(); ++k) {
        const std::size_t rows = dims[k + 1];
        const std::size_t cols = dims[k];
        out << "weight " << k << ' ' << rows << ' ' << cols << '\n';
        const auto w = net.weights(k);
        for (std::size_t r = 0; r < rows; ++r) {
            write_row(out, w.subspan(r * cols, cols));
        }
        out << "bias " << k << ' ' << rows << '\n';
        write_row(out, net.biases(k));
    }
    out << "end mlp\n";
}

Mlp read_mlp(LineReader& in) {
    const std::string header = in.expect("mlp header");
    const auto tokens = split_ws(header);
    if (tokens.size() < 2 || tokens[0] != "mlp") {
        throw ParseError(in.line_number(), "expected 'mlp <n> <dims...>'");
    }
    const std::size_t n = parse_uint(tokens[1], in.line_number());
    if (n < 2 || tokens.size() != n + 2) {
        throw ParseError(in.line_number(), "mlp header dimension count does not match");
    }
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < n; ++i) {
        dims.push_back(parse_uint(tokens[i + 2], in.line_number()));
    }
    Mlp net = [&] {
        try {
            return Mlp(dims);
        } catch (const InputError& e) {
            throw ParseError(in.line_number(), e.what());
        }
    }();
    for (std::size_t k = 0; k < net.num_layers(); ++k) {
        const std::size_t rows = dims[k + 1];
        const std::size_t cols = dims[k];
        expect_header(in, in.expect("weight header"), "weight", k, {rows, cols});
        auto w = net.weights(k);
        for (std::size_t r = 0; r < rows; ++r) {
            read_row(in, w.subspan(r * cols, cols), "weight row");
        }
        expect_header(in, in.expect("bias header"), "bias", k, {rows});
        read_row(in, net.biases(k), "bias row");
    }
    const std::string end = in.expect("'end mlp'");
    if (split_ws(end) != std::vector<std::string_view>{"end", "mlp"}) {
        throw ParseError(in.line_number(), "expected 'end mlp'");
    }
    try {
        net.check_finite();
    } catch (const NumericError& e) {
        throw ParseError(in.line_number(), e.what());
    }
    return net;
}

}  // namespace flowpref::nn
