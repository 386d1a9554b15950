#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mixconc/chain.hpp"

namespace mixconc {

// Chain spec files are JSON objects:
//
//   {
//     "name": "two-state",                     optional
//     "states": 2,
//     "initial": [0.5, 0.5],                   optional, defaults to pi
//     "transition": [[0.9, 0.1], [0.2, 0.8]],  row x = law of next state given x
//     "symbols": 3,                            required iff emission present
//     "emission": [[...], [...]]               row x = law of symbol given state x
//   }
//
// Rows are transposed into the column-stochastic internal layout. When
// `initial` is missing and the kernel is not ergodic, the uniform law is
// used so that mixing analysis can report the ergodicity failure itself.

/// Throws Error(Parse) with line context for malformed JSON and
/// Error(InvalidArgument / DimensionMismatch) naming the offending row.
ChainSpec parse_chain_spec(std::string_view text, std::string default_name = {});

/// Reads and parses a spec file; the name defaults to the file stem.
ChainSpec load_chain_spec(const std::filesystem::path& path);

/// Row-per-source JSON text that parse_chain_spec reads back.
std::string chain_spec_to_json(const ChainSpec& spec);

}  // namespace mixconc
