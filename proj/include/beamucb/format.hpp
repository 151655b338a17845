#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace beamucb {

// 17 significant digits; round-trips every finite double exactly.
std::string format_double(double v);

// strtod over the whole token; throws InvalidInput otherwise.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

}  // namespace beamucb
