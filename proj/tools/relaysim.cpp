// relaysim: command-line front end for the relay-selection experiments.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaysim/relaysim.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 1;
constexpr int exit_runtime_error = 2;

struct RunArgs {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string preset;
    std::size_t workers = relaysim::default_worker_count();
};

relaysim::OutputFormat pick_format(const RunArgs& args)
{
    if (args.format == "json") {
        return relaysim::OutputFormat::json;
    }
    if (args.format.empty() && args.out_path.size() >= 5 &&
        args.out_path.compare(args.out_path.size() - 5, 5, ".json") == 0) {
        return relaysim::OutputFormat::json;
    }
    return relaysim::OutputFormat::csv;
}

relaysim::ScenarioConfig build_config(const RunArgs& args)
{
    std::vector<std::string> docs;
    if (!args.preset.empty()) {
        docs.push_back(relaysim::preset_document(args.preset));
    }
    if (!args.config_path.empty()) {
        docs.push_back(relaysim::read_config_file(args.config_path));
    }
    if (docs.empty()) {
        throw relaysim::ConfigError(relaysim::ConfigError::Kind::missing_file, "",
                                    "either --config or --preset is required");
    }
    relaysim::ScenarioConfig config = relaysim::load_config_documents(docs);
    if (args.seed) {
        config.experiment.master_seed = *args.seed;
    }
    if (args.trials) {
        if (*args.trials == 0) {
            throw relaysim::ConfigError(relaysim::ConfigError::Kind::invalid_value, "trials",
                                        "--trials must be >= 1");
        }
        config.experiment.trials = *args.trials;
    }
    config.workers = args.workers;
    return config;
}

void report_fits(const relaysim::ScenarioConfig& config, const std::vector<relaysim::SlopeFit>& fits)
{
    for (const auto& fit : fits) {
        std::cout << "diversity fit: n_relays=" << fit.n_relays << " zeta=" << relaysim::format_real(fit.zeta)
                  << " points=" << fit.points_used << " slope=";
        if (fit.slope) {
            std::cout << relaysim::format_real(*fit.slope);
        } else {
            std::cout << "n/a";
        }
        std::cout << " theory=" << relaysim::format_real(fit.theoretical);
        if (config.experiment.kind == relaysim::ExperimentKind::dmt_check && !config.experiment.multiplexing_gain) {
            std::cout << " (fixed rate: theory is d(0) = N + 1)";
        }
        std::cout << '\n';
    }
}

int run(const RunArgs& args)
{
    relaysim::ScenarioConfig config;
    try {
        config = build_config(args);
    } catch (const relaysim::ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return exit_config_error;
    }

    try {
        const relaysim::RunResult result = relaysim::run_experiment(config);
        relaysim::emit_results(result.rows, pick_format(args), args.out_path);
        report_fits(config, result.fits);
        std::cerr << "wrote " << result.rows.size() << " rows to " << args.out_path << '\n';
    } catch (const relaysim::ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return exit_runtime_error;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint uplink/downlink relay selection simulator"};
    app.require_subcommand(1);

    RunArgs args;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its result table");
    run_cmd->add_option("--config", args.config_path, "Scenario YAML file");
    run_cmd->add_option("--out", args.out_path, "Output file")->required();
    run_cmd->add_option("--format", args.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--seed", args.seed, "Override experiment.master_seed");
    run_cmd->add_option("--trials", args.trials, "Override experiment.trials");
    run_cmd->add_option("--preset", args.preset, "Built-in scenario")->check(CLI::IsMember({"fig3a", "fig3b", "fig4"}));
    run_cmd->add_option("--workers", args.workers, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? exit_ok : exit_config_error;
    }
    return run(args);
}
