#include "beamucb/config.hpp"

#include <fstream>
#include <istream>

#include "beamucb/errors.hpp"
#include "beamucb/format.hpp"

namespace beamucb {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string unquote(std::string_view v) {
    std::string s = trim(v);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

bool parse_bool(std::string_view v) {
    const std::string s = lower(trim(v));
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw InvalidInput("not a boolean: '" + s + "'");
}

int parse_small_int(std::string_view v) {
    const long long x = parse_int(v);
    if (x < -2147483647LL || x > 2147483647LL) throw InvalidInput("integer out of range");
    return static_cast<int>(x);
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view v, F&& parse_one) {
    std::vector<T> out;
    const std::string s = trim(v);
    if (s.empty()) return out;
    std::string body = s;
    if (body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    if (trim(body).empty()) return out;
    for (const auto& tok : split(body, ',')) out.push_back(parse_one(unquote(tok)));
    return out;
}

KernelKind parse_kernel(std::string_view v) {
    const std::string s = lower(v);
    if (s == "se" || s == "squared_exponential") return KernelKind::SquaredExponential;
    if (s == "linear") return KernelKind::Linear;
    throw InvalidInput("unknown kernel: '" + s + "'");
}

std::string kernel_name(KernelKind k) { return k == KernelKind::SquaredExponential ? "se" : "linear"; }

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, double>)
            out += format_double(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "derived"; }

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::AbruptChange: return "abrupt";
        case Scenario::SlowDrift: return "slow";
        case Scenario::SyntheticRKHS: return "synthetic";
    }
    return "?";
}

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::RestartUnknownBudget: return "restart_unknown_budget";
        case Algorithm::RestartKnownBudget: return "restart_known_budget";
        case Algorithm::NoRestartCKB: return "no_restart_ckb";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    const std::string s = lower(trim(name));
    if (s == "abrupt" || s == "abrupt_change" || s == "abruptchange") return Scenario::AbruptChange;
    if (s == "slow" || s == "slow_drift" || s == "slowdrift") return Scenario::SlowDrift;
    if (s == "synthetic" || s == "synthetic_rkhs" || s == "syntheticrkhs") return Scenario::SyntheticRKHS;
    throw InvalidInput("unknown scenario: '" + s + "'");
}

Algorithm parse_algorithm(std::string_view name) {
    const std::string s = lower(trim(name));
    if (s == "restart_unknown_budget" || s == "restart_unknown" || s == "restartunknownbudget")
        return Algorithm::RestartUnknownBudget;
    if (s == "restart_known_budget" || s == "restart_known" || s == "restartknownbudget")
        return Algorithm::RestartKnownBudget;
    if (s == "no_restart_ckb" || s == "no_restart" || s == "ckb" || s == "norestartckb") return Algorithm::NoRestartCKB;
    throw InvalidInput("unknown algorithm: '" + s + "'");
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    std::string body = trim(text);
    if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    for (const auto& raw : split(body, ',')) {
        const std::string tok = trim(raw);
        if (tok.empty()) continue;
        const auto dash = tok.find('-', 1);
        if (dash != std::string::npos) {
            const long long lo = parse_int(tok.substr(0, dash));
            const long long hi = parse_int(tok.substr(dash + 1));
            if (lo < 0 || hi < lo) throw InvalidInput("bad seed range: '" + tok + "'");
            for (long long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
        } else {
            const long long s = parse_int(tok);
            if (s < 0) throw InvalidInput("seeds must be non-negative");
            seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    return seeds;
}

void apply_setting(ExperimentConfig& c, std::string_view section_in, std::string_view key_in, std::string_view raw) {
    const std::string section = lower(trim(section_in));
    const std::string key = lower(trim(key_in));
    const std::string v = unquote(raw);
    const std::string name = section + "." + key;
    auto num = [&] { return parse_double(v); };
    auto integer = [&] { return parse_small_int(v); };

    if (name == "experiment.scenario") c.scenario = parse_scenario(v);
    else if (name == "experiment.horizon") c.horizon = integer();
    else if (name == "experiment.seeds") c.seeds = parse_seed_list(v);
    else if (name == "experiment.algorithms") c.algorithms = parse_list<Algorithm>(v, [](const std::string& s) { return parse_algorithm(s); });
    else if (name == "experiment.out") c.out_dir = v;
    else if (name == "experiment.save_traces") c.save_traces = parse_bool(v);
    else if (name == "environment.antennas") c.antennas = integer();
    else if (name == "environment.beams") c.beams = integer();
    else if (name == "environment.paths") c.paths = integer();
    else if (name == "environment.interfered_ues") c.interfered_ues = integer();
    else if (name == "environment.carrier_freq_hz") c.carrier_freq_hz = num();
    else if (name == "environment.change_times") c.change_times = parse_list<int>(v, [](const std::string& s) { return parse_small_int(s); });
    else if (name == "environment.ar_coefficient") c.slow.ar_coefficient = num();
    else if (name == "environment.innovation_std") c.slow.innovation_std = num();
    else if (name == "environment.gain_drift_scale") c.slow.gain_drift_scale = num();
    else if (name == "environment.threshold_quantile") c.threshold_quantile = num();
    else if (name == "environment.thresholds") c.thresholds = parse_list<double>(v, [](const std::string& s) { return parse_double(s); });
    else if (name == "environment.noise_relative") c.noise_relative = num();
    else if (name == "environment.noise_std_reward") c.noise_std_reward = num();
    else if (name == "environment.noise_std_constraint") c.noise_std_constraint = num();
    else if (name == "synthetic.centers") c.synthetic.centers = integer();
    else if (name == "synthetic.length_scale") c.synthetic.length_scale = num();
    else if (name == "synthetic.variation_budget") c.synthetic.variation_budget = num();
    else if (name == "kernel.reward") c.reward_kernel = parse_kernel(v);
    else if (name == "kernel.constraint") c.constraint_kernel = parse_kernel(v);
    else if (name == "kernel.reward_length_scale") c.reward_length_scale = num();
    else if (name == "kernel.constraint_length_scale") c.constraint_length_scale = num();
    else if (name == "bandit.lambda") c.lambda = num();
    else if (name == "bandit.delta") c.delta = num();
    else if (name == "bandit.gamma_mode") {
        const std::string s = lower(v);
        if (s == "realized") c.gamma_mode = GammaMode::Realized;
        else if (s == "theoretical_se" || s == "theoretical") c.gamma_mode = GammaMode::TheoreticalSE;
        else throw InvalidInput("unknown gamma_mode: '" + v + "'");
    } else if (name == "bandit.projection") {
        const std::string s = lower(v);
        if (s == "mean_only") c.projection = ProjectionScope::MeanOnly;
        else if (s == "full_estimate") c.projection = ProjectionScope::FullEstimate;
        else throw InvalidInput("unknown projection: '" + v + "'");
    } else if (name == "bandit.oracle") {
        const std::string s = lower(v);
        if (s == "randomized") c.oracle = OracleMode::Randomized;
        else if (s == "deterministic") c.oracle = OracleMode::DeterministicBestFeasible;
        else throw InvalidInput("unknown oracle: '" + v + "'");
    }
    else if (name == "bandit.reward_bound") c.reward_bound = num();
    else if (name == "bandit.constraint_bound") c.constraint_bound = num();
    else if (name == "bandit.slater_margin") c.slater_margin = num();
    else if (name == "bandit.dual_cap") c.dual_cap = num();
    else if (name == "bandit.dual_step") c.dual_step = num();
    else if (name == "bandit.noise_param") c.noise_param = num();
    else if (name == "bandit.budget") c.budget = num();
    else if (name == "bandit.restart_period") c.restart_period = integer();
    else throw InvalidInput("unknown config key: " + name);
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string section = "experiment";
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string l = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (l.empty()) continue;
        try {
            if (l.front() == '[') {
                if (l.back() != ']') throw InvalidInput("unterminated section header");
                section = lower(trim(l.substr(1, l.size() - 2)));
                if (section != "experiment" && section != "environment" && section != "synthetic" &&
                    section != "kernel" && section != "bandit")
                    throw InvalidInput("unknown section [" + section + "]");
                continue;
            }
            const auto eq = l.find('=');
            if (eq == std::string::npos) throw InvalidInput("expected key = value");
            apply_setting(c, section, l.substr(0, eq), l.substr(eq + 1));
        } catch (const InvalidInput& e) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config: " + path.string());
    return parse_config(in);
}

void ExperimentConfig::validate() const {
    if (horizon < 1) throw InvalidInput("config: horizon must be >= 1");
    if (seeds.empty()) throw InvalidInput("config: at least one seed required");
    if (algorithms.empty()) throw InvalidInput("config: at least one algorithm required");
    if (antennas < 1) throw InvalidInput("config: antennas must be >= 1");
    if (beams < 2) throw InvalidInput("config: beams must be >= 2");
    if (interfered_ues < 1) throw InvalidInput("config: at least one interfered UE required");
    if (!(lambda > 0.0)) throw InvalidInput("config: lambda must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("config: delta must lie in (0, 1)");
    if (!(reward_length_scale > 0.0) || !(constraint_length_scale > 0.0))
        throw InvalidInput("config: kernel length scales must be positive");
    if (restart_period && (*restart_period < 1 || *restart_period > horizon))
        throw InvalidInput("config: restart_period must lie in [1, horizon]");
    for (const auto& [name, v] : {std::pair{"reward_bound", reward_bound}, {"constraint_bound", constraint_bound},
                                  {"slater_margin", slater_margin}, {"dual_cap", dual_cap}, {"dual_step", dual_step},
                                  {"noise_param", noise_param}})
        if (v && !(*v > 0.0)) throw InvalidInput(std::string("config: ") + name + " must be positive");
    if (budget && !(*budget >= 0.0)) throw InvalidInput("config: budget must be >= 0");
    if (scenario == Scenario::SyntheticRKHS)
        synthetic.validate();
    else
        channel_model().validate();
}

ChannelModel ExperimentConfig::channel_model() const {
    ChannelModel m;
    m.paths = paths;
    m.carrier_freq_hz = carrier_freq_hz;
    m.ue_count = interfered_ues + 1;
    if (scenario == Scenario::SlowDrift)
        m.drift = slow;
    else
        m.drift = AbruptDrift{change_times};
    m.thresholds = thresholds;
    m.threshold_quantile = threshold_quantile;
    m.noise_relative = noise_relative;
    m.noise_std_reward = noise_std_reward;
    m.noise_std_constraint = noise_std_constraint;
    return m;
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c) {
    std::vector<std::string> algos;
    for (auto a : c.algorithms) algos.emplace_back(to_string(a));
    std::string algo_list;
    for (std::size_t i = 0; i < algos.size(); ++i) algo_list += (i ? "," : "") + algos[i];
    return {
        {"experiment.scenario", std::string(to_string(c.scenario))},
        {"experiment.horizon", std::to_string(c.horizon)},
        {"experiment.seeds", join(c.seeds)},
        {"experiment.algorithms", algo_list},
        {"experiment.save_traces", c.save_traces ? "true" : "false"},
        {"environment.antennas", std::to_string(c.antennas)},
        {"environment.beams", std::to_string(c.beams)},
        {"environment.paths", std::to_string(c.paths)},
        {"environment.interfered_ues", std::to_string(c.interfered_ues)},
        {"environment.carrier_freq_hz", format_double(c.carrier_freq_hz)},
        {"environment.change_times", join(c.change_times)},
        {"environment.ar_coefficient", format_double(c.slow.ar_coefficient)},
        {"environment.innovation_std", format_double(c.slow.innovation_std)},
        {"environment.gain_drift_scale", format_double(c.slow.gain_drift_scale)},
        {"environment.threshold_quantile", format_double(c.threshold_quantile)},
        {"environment.thresholds", c.thresholds.empty() ? "quantile_at_t1" : join(c.thresholds)},
        {"environment.noise_relative", format_double(c.noise_relative)},
        {"environment.noise_std_reward", opt(c.noise_std_reward)},
        {"environment.noise_std_constraint", opt(c.noise_std_constraint)},
        {"synthetic.centers", std::to_string(c.synthetic.centers)},
        {"synthetic.length_scale", format_double(c.synthetic.length_scale)},
        {"synthetic.variation_budget", format_double(c.synthetic.variation_budget)},
        {"kernel.reward", kernel_name(c.reward_kernel)},
        {"kernel.constraint", kernel_name(c.constraint_kernel)},
        {"kernel.reward_length_scale", format_double(c.reward_length_scale)},
        {"kernel.constraint_length_scale", format_double(c.constraint_length_scale)},
        {"bandit.lambda", format_double(c.lambda)},
        {"bandit.delta", format_double(c.delta)},
        {"bandit.gamma_mode", std::string(to_string(c.gamma_mode))},
        {"bandit.projection", std::string(to_string(c.projection))},
        {"bandit.oracle", std::string(to_string(c.oracle))},
        {"bandit.reward_bound", opt(c.reward_bound)},
        {"bandit.constraint_bound", opt(c.constraint_bound)},
        {"bandit.slater_margin", opt(c.slater_margin)},
        {"bandit.dual_cap", opt(c.dual_cap)},
        {"bandit.dual_step", opt(c.dual_step)},
        {"bandit.noise_param", opt(c.noise_param)},
        {"bandit.budget", opt(c.budget)},
        {"bandit.restart_period", c.restart_period ? std::to_string(*c.restart_period) : "derived"},
    };
}

}  // namespace beamucb
