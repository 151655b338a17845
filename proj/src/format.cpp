#include "beamucb/format.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

#include "beamucb/errors.hpp"

namespace beamucb {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view token) {
    const std::string s = trim(token);
    if (s.empty()) throw InvalidInput("expected a number, got empty token");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) throw InvalidInput("not a number: '" + s + "'");
    return v;
}

long long parse_int(std::string_view token) {
    const std::string s = trim(token);
    if (s.empty()) throw InvalidInput("expected an integer, got empty token");
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) throw InvalidInput("not an integer: '" + s + "'");
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

}  // namespace beamucb
