#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cwescout::util {

using ordered_json = nlohmann::ordered_json;

/// SHA-256 of `data`, lowercase hex.
std::string sha256_hex(std::string_view data);

/// Serializes JSON with stable key order (insertion order of ordered_json)
/// and fixed-point floats at `float_decimals` places. This is the one
/// serializer used for every on-disk artifact that tests diff byte-for-byte.
std::string dump_deterministic(const ordered_json& value, int float_decimals = 6);

/// Case-folds ASCII and collapses runs of whitespace to single spaces,
/// trimming the ends. Used for question dedup keys.
std::string normalize_ws_casefold(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

/// Splits on '\n' without consuming any other byte; a lone '\r' stays part
/// of the line. Returns the lines and whether the input ended with '\n'.
std::pair<std::vector<std::string>, bool> split_lines(std::string_view text);

/// Glob match supporting '*' (no '/'), '?' (any single char but '/') and
/// '**' (anything including '/'). Paths use '/' separators.
bool glob_match(std::string_view pattern, std::string_view path);

/// Replaces invalid UTF-8 sequences with U+FFFD. Valid input passes
/// through unchanged.
std::string utf8_lossy(std::string_view bytes);

/// Fixed-point formatting helpers (printf-compatible, locale-free).
std::string format_fixed(double value, int decimals);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace cwescout::util
