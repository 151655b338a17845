// beamucb: experiment harness for constrained restart GP-UCB beam alignment.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamucb/config.hpp"
#include "beamucb/errors.hpp"
#include "beamucb/experiment.hpp"
#include "beamucb/format.hpp"
#include "beamucb/trace_io.hpp"

namespace {

using namespace beamucb;

struct CommonOptions {
    std::string config_path;
    std::string scenario;
    std::string seeds;
    std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Experiment config file (TOML-style)");
    cmd->add_option("--scenario", o.scenario, "abrupt | slow | synthetic");
    cmd->add_option("--set", o.settings, "Override one setting: section.key=value (repeatable)");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (!o.scenario.empty()) c.scenario = parse_scenario(o.scenario);
    if (!o.seeds.empty()) c.seeds = parse_seed_list(o.seeds);
    for (const auto& s : o.settings) {
        const auto eq = s.find('=');
        const auto dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw InvalidInput("--set expects section.key=value, got '" + s + "'");
        apply_setting(c, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    c.validate();
    return c;
}

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interference-constrained beam alignment with restart GP-UCB"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::string run_out;
    auto* run = app.add_subcommand("run", "Run the experiment over all seeds and algorithms");
    add_common(run, run_opts);
    run->add_option("--seeds", run_opts.seeds, "Seed list, e.g. 1,2,3 or 1-10");
    run->add_option("--out", run_out, "Output directory");

    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("plot-data", "Write plot-ready panel files from aggregate CSVs");
    plot->add_option("--in", plot_in, "Directory holding aggregate_*.csv")->required();
    plot->add_option("--out", plot_out, "Output directory")->required();

    auto* trace = app.add_subcommand("trace", "Standalone trace handling");
    trace->require_subcommand(1);
    CommonOptions gen_opts;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = trace->add_subcommand("gen", "Generate one environment trace");
    add_common(gen, gen_opts);
    gen->add_option("--seed", gen_seed, "Master seed");
    gen->add_option("--out", gen_out, "Trace file to write")->required();
    std::string inspect_path;
    auto* inspect = trace->add_subcommand("inspect", "Print a trace header and validity checks");
    inspect->add_option("path", inspect_path, "Trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*run) {
        return guarded([&] {
            ExperimentConfig c = resolve_config(run_opts);
            if (!run_out.empty()) c.out_dir = run_out;
            const int status = run_experiment(c);
            if (status == 0) std::cout << "wrote results to " << c.out_dir.string() << '\n';
            return status;
        });
    }
    if (*plot) {
        return guarded([&] {
            emit_plot_data(plot_in, plot_out);
            std::cout << "wrote regret_avg.csv and violation_avg.csv to " << plot_out << '\n';
            return 0;
        });
    }
    if (*gen) {
        return guarded([&] {
            const ExperimentConfig c = resolve_config(gen_opts);
            const EnvironmentTrace tr = make_trace(c, make_codebook(c), gen_seed);
            save_trace(gen_out, tr);
            std::cout << "wrote " << gen_out << " (T=" << tr.horizon << ", |X|=" << tr.arm_count() << ")\n";
            return 0;
        });
    }
    if (*inspect) {
        return guarded([&] {
            const EnvironmentTrace tr = load_trace(inspect_path);
            std::cout << "horizon = " << tr.horizon << "\narms = " << tr.arm_count() << "\nseed = " << tr.seed
                      << "\nattempts = " << tr.attempts << "\nderived_B = " << format_double(tr.derived_B)
                      << "\nderived_G = " << format_double(tr.derived_G)
                      << "\nderived_tau = " << format_double(tr.derived_tau)
                      << "\nderived_B_f = " << format_double(tr.derived_B_f)
                      << "\nderived_B_g = " << format_double(tr.derived_B_g) << '\n';
            for (const auto& [k, v] : tr.metadata) std::cout << "meta." << k << " = " << v << '\n';
            const TraceCheck check = check_trace(tr);
            std::cout << "check.rss_nonnegative = " << check.rss_nonnegative
                      << "\ncheck.slater_feasible = " << check.slater_feasible
                      << "\ncheck.piecewise_constant = " << check.piecewise_constant
                      << "\ncheck.constants_consistent = " << check.constants_consistent << '\n';
            if (!check.ok()) {
                std::cerr << "trace check failed: " << check.detail << '\n';
                return 3;
            }
            return 0;
        });
    }
    return 2;
}
