#include "beamucb/trace_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "beamucb/errors.hpp"
#include "beamucb/format.hpp"

namespace beamucb {

namespace {

constexpr const char* kMagic = "beamucb-trace 1";

void write_matrix(std::ostream& out, const char* name, const RowMatrix& m) {
    out << '[' << name << "]\n";
    out << 't';
    for (Eigen::Index a = 0; a < m.cols(); ++a) out << ",a" << a;
    out << '\n';
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
        out << t + 1;
        for (Eigen::Index a = 0; a < m.cols(); ++a) out << ',' << format_double(m(t, a));
        out << '\n';
    }
}

RowMatrix read_matrix(std::istream& in, const char* name, int rows, int cols) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != std::string("[") + name + "]")
        throw InvalidInput(std::string("trace: expected [") + name + "] block");
    if (!std::getline(in, line) || static_cast<int>(split(trim(line), ',').size()) != cols + 1)
        throw InvalidInput(std::string("trace: bad column header in [") + name + "]");
    RowMatrix m(rows, cols);
    for (int t = 0; t < rows; ++t) {
        if (!std::getline(in, line)) throw InvalidInput(std::string("trace: truncated [") + name + "] block");
        const auto cells = split(trim(line), ',');
        if (static_cast<int>(cells.size()) != cols + 1)
            throw InvalidInput(std::string("trace: wrong cell count in [") + name + "] row " + std::to_string(t + 1));
        if (parse_int(cells[0]) != t + 1) throw InvalidInput("trace: rows out of order");
        for (int a = 0; a < cols; ++a) m(t, a) = parse_double(cells[static_cast<std::size_t>(a + 1)]);
    }
    return m;
}

}  // namespace

void write_trace(std::ostream& out, const EnvironmentTrace& trace) {
    out << kMagic << '\n';
    out << "horizon = " << trace.horizon << '\n';
    out << "arms = " << trace.arm_count() << '\n';
    out << "seed = " << trace.seed << '\n';
    out << "attempts = " << trace.attempts << '\n';
    out << "noise_std_reward = " << format_double(trace.noise_std_reward) << '\n';
    out << "noise_std_constraint = " << format_double(trace.noise_std_constraint) << '\n';
    out << "derived_B = " << format_double(trace.derived_B) << '\n';
    out << "derived_G = " << format_double(trace.derived_G) << '\n';
    out << "derived_tau = " << format_double(trace.derived_tau) << '\n';
    out << "derived_B_f = " << format_double(trace.derived_B_f) << '\n';
    out << "derived_B_g = " << format_double(trace.derived_B_g) << '\n';
    if (trace.change_times) {
        out << "effective_change_times = ";
        for (std::size_t i = 0; i < trace.change_times->size(); ++i) out << (i ? "," : "") << (*trace.change_times)[i];
        out << '\n';
    }
    for (const auto& [k, v] : trace.metadata) out << "meta." << k << " = " << v << '\n';
    out << "end-header\n";
    write_matrix(out, "f", trace.f);
    write_matrix(out, "g", trace.g);
}

EnvironmentTrace read_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kMagic) throw InvalidInput("trace: missing header magic");
    EnvironmentTrace trace;
    std::map<std::string, std::string> core;
    while (true) {
        if (!std::getline(in, line)) throw InvalidInput("trace: unterminated header");
        const std::string l = trim(line);
        if (l == "end-header") break;
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw InvalidInput("trace: malformed header line: " + l);
        const std::string key = trim(l.substr(0, eq));
        const std::string value = trim(l.substr(eq + 1));
        if (key.rfind("meta.", 0) == 0)
            trace.metadata.emplace_back(key.substr(5), value);
        else
            core[key] = value;
    }
    auto need = [&](const char* key) -> const std::string& {
        const auto it = core.find(key);
        if (it == core.end()) throw InvalidInput(std::string("trace: missing header key ") + key);
        return it->second;
    };
    trace.horizon = static_cast<int>(parse_int(need("horizon")));
    const auto arms = static_cast<int>(parse_int(need("arms")));
    if (trace.horizon < 1 || arms < 1) throw InvalidInput("trace: horizon and arm count must be positive");
    trace.seed = std::stoull(need("seed"));
    trace.attempts = static_cast<int>(parse_int(need("attempts")));
    trace.noise_std_reward = parse_double(need("noise_std_reward"));
    trace.noise_std_constraint = parse_double(need("noise_std_constraint"));
    trace.derived_B = parse_double(need("derived_B"));
    trace.derived_G = parse_double(need("derived_G"));
    trace.derived_tau = parse_double(need("derived_tau"));
    trace.derived_B_f = parse_double(need("derived_B_f"));
    trace.derived_B_g = parse_double(need("derived_B_g"));
    if (const auto it = core.find("effective_change_times"); it != core.end()) {
        std::vector<int> ct;
        if (!it->second.empty())
            for (const auto& c : split(it->second, ',')) ct.push_back(static_cast<int>(parse_int(c)));
        trace.change_times = ct;
    }
    trace.f = read_matrix(in, "f", trace.horizon, arms);
    trace.g = read_matrix(in, "g", trace.horizon, arms);
    return trace;
}

void save_trace(const std::filesystem::path& path, const EnvironmentTrace& trace) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open for writing: " + path.string());
    write_trace(out, trace);
    if (!out) throw InvalidInput("write failed: " + path.string());
}

EnvironmentTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open trace: " + path.string());
    return read_trace(in);
}

}  // namespace beamucb
