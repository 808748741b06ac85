#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bilat/system.hpp"

namespace bilat {

/// Parses a JSON system document.
///
/// Fields: n, t0 (optional), A_star (row-major, n*n numbers), G_star (list of
/// {row, col, value}), terms (list of {target, coefficient, factors: [{slot,
/// component, power}]}), delays {h_lo, h_hi, functions}, forcing {F0,
/// direction}, history {kind: "constant" | "cosine", x0}. Every time function
/// is either a number or {offset, waves: [{amplitude, frequency, phase}]}.
///
/// Throws ConfigParse (with line and column) on malformed JSON and
/// SchemaMismatch (naming the offending field) on structural errors.
[[nodiscard]] VectorDelaySystem parse_system_config(std::string_view text);
[[nodiscard]] VectorDelaySystem load_system_config(const std::filesystem::path& path);

/// Inverse of parse_system_config, pretty-printed.
[[nodiscard]] std::string system_config_to_json(const VectorDelaySystem& sys);

}  // namespace bilat
