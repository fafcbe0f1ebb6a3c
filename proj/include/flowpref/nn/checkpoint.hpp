// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "flowpref/common/text_io.hpp"
#include "flowpref/nn/mlp.hpp"

namespace flowpref::nn {

/// Text checkpoint block for an Mlp:
///
///     mlp <n> <d0> <d1> ... <d(n-1)>
///     weight <k> <rows> <cols>
///     <cols values>            (one line per row, row-major)
///     bias <k> <rows>
///     <rows values>
///     ...
///     end mlp
///
/// Values use the shortest decimal form that round-trips, so reading a
/// written block reproduces every parameter bit-for-bit.
void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(LineReader& in);

}  // namespace flowpref::nn
