// SPDX-License-Identifier: Apache-2.0
#include "flowpref/flow/model_io.hpp"

#include <sstream>

#include "flowpref/common/errors.hpp"
#include "flowpref/nn/checkpoint.hpp"

namespace flowpref::flow {

namespace {

std::vector<std::string_view> keyed(LineReader& in, const std::string& line, std::string_view key,
                                    std::size_t values) {
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0] != key || (values != 0 && tokens.size() != values + 1)) {
        throw ParseError(in.line_number(), "expected '" + std::string(key) + "' record");
    }
    tokens.erase(tokens.begin());
    return tokens;
}

}  // namespace

void write_velocity_model(std::ostream& out, const VelocityModel& model) {
    out << "velocity_model 1\n";
    out << "dim " << model.dim() << '\n';
    out << "num_classes " << model.num_classes() << '\n';
    out << "cond_drop_prob " << format_double(model.cond_drop_prob()) << '\n';
    out << "null_embedding";
    for (double v : model.null_embedding()) {
        out << ' ' << format_double(v);
    }
    out << '\n';
    nn::write_mlp(out, model.net());
}

VelocityModel read_velocity_model(LineReader& in) {
    std::string line = in.expect("velocity_model header");
    if (split_ws(line) != std::vector<std::string_view>{"velocity_model", "1"}) {
        throw ParseError(in.line_number(), "not a velocity_model v1 checkpoint");
    }
    line = in.expect("dim");
    const std::size_t dim = parse_uint(keyed(in, line, "dim", 1)[0], in.line_number());
    line = in.expect("num_classes");
    const std::size_t k = parse_uint(keyed(in, line, "num_classes", 1)[0], in.line_number());
    line = in.expect("cond_drop_prob");
    const double drop = parse_double(keyed(in, line, "cond_drop_prob", 1)[0], in.line_number());
    line = in.expect("null_embedding");
    const auto null_tokens = keyed(in, line, "null_embedding", k + 1);
    const Vec expected = null_embedding(k);
    for (std::size_t i = 0; i <= k; ++i) {
        if (parse_double(null_tokens[i], in.line_number()) != expected[i]) {
            throw ParseError(in.line_number(), "null_embedding does not match the one-hot null slot");
        }
    }
    nn::Mlp net = nn::read_mlp(in);
    try {
        return VelocityModel(dim, k, drop, std::move(net));
    } catch (const InputError& e) {
        throw ParseError(in.line_number(), e.what());
    }
}

std::string velocity_model_to_string(const VelocityModel& model) {
    std::ostringstream out;
    write_velocity_model(out, model);
    return out.str();
}

VelocityModel velocity_model_from_string(const std::string& text) {
    std::istringstream in(text);
    LineReader reader(in);
    return read_velocity_model(reader);
}

void save_velocity_model(const std::string& path, const VelocityModel& model) {
    write_file(path, velocity_model_to_string(model));
}

VelocityModel load_velocity_model(const std::string& path) {
    return velocity_model_from_string(read_file(path));
}

std::string checkpoint_id(const VelocityModel& model) {
    return hex_id(fnv1a(velocity_model_to_string(model)));
}

}  // namespace flowpref::flow
