#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ergocert/ergocert.hpp"

namespace {

enum Exit : int { ok = 0, config_error = 2, consistency_error = 3 };

int run(const std::string& command, const std::string& config, const std::string& out,
        const std::optional<std::uint64_t>& seed, bool quiet) {
    try {
        ergocert::RunConfig c = ergocert::load_config(config);
        if (!c.command.empty() && c.command != command)
            throw ergocert::ConfigError("command", "config is for '" + c.command + "', not '" + command + "'");
        if (!out.empty()) c.out_dir = out;
        if (seed) c.mc.seed = *seed;
        const auto res = ergocert::run_command(command, c);
        if (!quiet) {
            std::cout << res.headline;
            for (const auto& f : res.files) std::cout << "wrote " << f.string() << "\n";
        }
        return ok;
    } catch (const ergocert::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ergocert::InternalConsistencyError& e) {
        std::cerr << "internal consistency error: " << e.what() << "\n";
        return consistency_error;
    } catch (const ergocert::DomainError& e) {
        // a model/criterion combination the config asked for cannot be evaluated
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergocert: stability certificates for Markov kernels"};
    app.require_subcommand(1);

    std::string config, out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    for (const char* name : {"classify", "solve", "simulate", "truncate-study"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON run config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides output.dir)");
        sub->add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
        sub->add_flag("--quiet", quiet, "no terminal output");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : config_error;
    }
    return run(app.get_subcommands().front()->get_name(), config, out, seed, quiet);
}
