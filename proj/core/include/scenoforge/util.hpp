#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenoforge {

// Canonical decimal formatting for file output. Two places for coordinates
// and speeds, six for lane lengths. Negative zero collapses to zero so equal
// values always serialize to identical bytes.
std::string format_fixed(double value, int places = 2);

// Locale-independent strict parsers. The whole string must be consumed.
// Rejects NaN/Inf and hex floats.
std::optional<double> parse_double(std::string_view text);
std::optional<long> parse_int(std::string_view text);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string to_lower(std::string_view text);
bool starts_with(std::string_view text, std::string_view prefix);

// Collapses all whitespace runs to single spaces and trims the ends.
// Used when matching live prompts against recorded transcript requests.
std::string normalize_whitespace(std::string_view text);

// FNV-1a, used for content digests in logs and tests. Not cryptographic.
std::uint64_t fnv1a(std::string_view data);
std::string hex_digest(std::string_view data);

// Identifier rule shared by all parsers: nonempty, no whitespace, and none
// of the characters that break downstream tooling ('#', ':').
bool valid_identifier(std::string_view id);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

// "http://host:port/prefix" -> base "http://host:port" + path prefix.
struct EndpointParts {
  std::string base;
  std::string prefix;
};
EndpointParts split_endpoint(const std::string& endpoint);

}  // namespace scenoforge
