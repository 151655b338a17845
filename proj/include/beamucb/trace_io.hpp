#pragma once

#include <filesystem>
#include <iosfwd>

#include "beamucb/env.hpp"

namespace beamucb {

// Text format: a `key = value` header (model metadata under `meta.`),
// terminated by `end-header`, then `[f]` and `[g]` CSV blocks with a
// `t,a0,a1,...` header row. Every double is printed with 17 significant
// digits, so read_trace(write_trace(x)) reproduces x bit for bit.
void write_trace(std::ostream& out, const EnvironmentTrace& trace);
EnvironmentTrace read_trace(std::istream& in);

void save_trace(const std::filesystem::path& path, const EnvironmentTrace& trace);
EnvironmentTrace load_trace(const std::filesystem::path& path);

}  // namespace beamucb
