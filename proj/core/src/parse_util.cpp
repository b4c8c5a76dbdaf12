#include "parse_util.hpp"

#include <cstdlib>
#include <sstream>

namespace streamq::detail {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto end = s.find(sep, start);
        const std::string piece = trim(s.substr(start, end - start));
        if (piece.empty()) return {};
        out.push_back(piece);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

bool parse_double_str(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* text = s.c_str();
    char* end = nullptr;
    out = std::strtod(text, &end);
    return end != text && *end == '\0';
}

bool parse_u64_str(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s.front() == '-') return false;
    const char* text = s.c_str();
    char* end = nullptr;
    out = std::strtoull(text, &end, 10);
    return end != text && *end == '\0';
}

} // namespace streamq::detail
