#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Internal text helpers shared by the config and stream-spec parsers.

namespace streamq::detail {

std::string trim(const std::string& s);
std::vector<std::string> split_ws(const std::string& s);

/// Split on `sep`, trimming each piece; empty pieces are rejected by
/// returning an empty vector (callers treat that as a parse failure).
std::vector<std::string> split_list(const std::string& s, char sep);

/// Full-string numeric parses; false on trailing garbage or empty input.
bool parse_double_str(const std::string& s, double& out);
bool parse_u64_str(const std::string& s, std::uint64_t& out);

} // namespace streamq::detail
