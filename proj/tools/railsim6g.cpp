#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "railsim/core/config.hpp"
#include "railsim/core/experiment.hpp"
#include "railsim/core/metrics.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("RAILSIM_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    railsim::experiments::register_all();

    CLI::App app{"Link-level 6G smart-railway simulation toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed_override = 0;
    int trials_override = 0;

    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "scenario file path")->required();
    auto* seed_opt =
        run->add_option("--seed", seed_override, "override the scenario seed");
    run->add_option("--trials", trials_override, "override the trial count");
    run->add_option("--out", out_path, "output path (default: scenario output_path or stdout)");
    run->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* list = app.add_subcommand("list", "List registered scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& [name, exp] :
                 railsim::core::ExperimentRegistry::instance().all()) {
                std::printf("%-16s %s\n", name.c_str(), exp.description.c_str());
            }
            return 0;
        }

        railsim::core::ScenarioConfig config =
            railsim::core::load_scenario(scenario_path);
        if (seed_opt->count() > 0) config.seed = seed_override;
        if (trials_override > 0) config.trials = trials_override;
        if (trials_override < 0)
            throw railsim::core::ConfigError(
                railsim::core::ConfigError::Kind::Validation,
                "trials must be >= 1");
        if (!out_path.empty()) config.output_path = out_path;

        if (log_level() >= 2)
            std::fprintf(stderr, "running '%s' seed=%llu trials=%d\n",
                         config.scenario_name.c_str(),
                         static_cast<unsigned long long>(config.seed),
                         config.trials);

        const railsim::core::MetricsTable table =
            railsim::core::run_scenario(config);
        const auto fmt = format == "json" ? railsim::core::TableFormat::Json
                                          : railsim::core::TableFormat::Csv;
        if (config.output_path.empty()) {
            std::fputs(fmt == railsim::core::TableFormat::Json
                           ? table.to_json().c_str()
                           : table.to_csv().c_str(),
                       stdout);
        } else {
            railsim::core::write_table(table, config.output_path, fmt);
            if (log_level() >= 1)
                std::fprintf(stderr, "wrote %s (%zu rows, %.2fs)\n",
                             config.output_path.c_str(), table.num_rows(),
                             table.meta.wall_seconds);
        }
        return 0;
    } catch (const railsim::core::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
