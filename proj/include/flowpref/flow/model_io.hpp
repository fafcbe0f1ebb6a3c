// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "flowpref/common/text_io.hpp"
#include "flowpref/flow/velocity_model.hpp"

namespace flowpref::flow {

/// Velocity-model checkpoint: a header recording d, K, cond_drop_prob and
/// the null embedding, followed by the Mlp block.
///
///     velocity_model 1
///     dim <d>
///     num_classes <K>
///     cond_drop_prob <p>
///     null_embedding <K+1 values>
///     mlp ...
void write_velocity_model(std::ostream& out, const VelocityModel& model);
VelocityModel read_velocity_model(LineReader& in);

std::string velocity_model_to_string(const VelocityModel& model);
VelocityModel velocity_model_from_string(const std::string& text);

void save_velocity_model(const std::string& path, const VelocityModel& model);
VelocityModel load_velocity_model(const std::string& path);

/// Content id (FNV-1a of the serialized checkpoint).
std::string checkpoint_id(const VelocityModel& model);

}  // namespace flowpref::flow
