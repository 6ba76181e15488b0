#pragma once

#include "sipkit/stream.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sipkit::detail {

/// Strips a trailing `#` comment and surrounding whitespace.
inline std::string trim(const std::string& s) {
    auto hash = s.find('#');
    std::string t = hash == std::string::npos ? s : s.substr(0, hash);
    auto b = t.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = t.find_last_not_of(" \t\r");
    return t.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::optional<std::int64_t> to_int(const std::string& tok) {
    std::string_view sv(tok);
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size() || sv.empty()) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> to_uint(const std::string& tok) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) return std::nullopt;
    return v;
}

/// Parses "key=value" into value; throws ParseError on mismatch.
inline std::string keyed(const std::string& tok, const std::string& key, std::size_t line) {
    if (tok.rfind(key + "=", 0) != 0) throw ParseError(line, "expected " + key + "=<value>, got '" + tok + "'");
    return tok.substr(key.size() + 1);
}

inline std::int64_t keyed_int(const std::string& tok, const std::string& key, std::size_t line) {
    auto v = to_int(keyed(tok, key, line));
    if (!v) throw ParseError(line, "bad integer in '" + tok + "'");
    return *v;
}

inline std::uint64_t keyed_uint(const std::string& tok, const std::string& key, std::size_t line) {
    auto v = to_uint(keyed(tok, key, line));
    if (!v) throw ParseError(line, "bad integer in '" + tok + "'");
    return *v;
}

/// Next non-blank line after trimming; advances `line`.
inline bool next_content_line(std::istream& in, std::string& out, std::size_t& line) {
    std::string raw;
    while (std::getline(in, raw)) {
        ++line;
        out = trim(raw);
        if (!out.empty()) return true;
    }
    return false;
}

}  // namespace sipkit::detail
