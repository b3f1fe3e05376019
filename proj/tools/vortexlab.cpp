#include "vortexlab/errors.hpp"
#include "vortexlab/runner.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("vortexlab");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("VORTEXLAB_LOG");
    const std::string level = env ? env : "error";
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else spdlog::set_level(spdlog::level::err);
    if (level != "debug" && level != "info" && level != "error")
        spdlog::error("VORTEXLAB_LOG: expected error, info or debug; using error");
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Numerical laboratory for vortex equations on half-cylinders"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "concurrent sweep cells")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "perturbation seed");
    for (const char* name : {"oracle", "solve", "analyze", "hessian", "check", "sweep"})
        app.add_subcommand(name, std::string("run the ") + name + " scenario")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vortexlab::kExitInvalidConfig;
    }

    vortexlab::RunConfig config;
    try {
        config = config_path.empty() ? vortexlab::parse_config(nlohmann::json::object())
                                     : vortexlab::load_config(config_path);
        config.scenario = app.get_subcommands().front()->get_name();
        if (out_dir) config.output = *out_dir;
        if (workers) config.workers = *workers;
        if (seed) config.seed = *seed;
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return vortexlab::exit_code_for(e);
    }

    const vortexlab::RunOutcome outcome = vortexlab::run(config);
    if (outcome.exit_code != vortexlab::kExitOk) std::cerr << outcome.error << "\n";
    return outcome.exit_code;
}
