// doslab: finite-volume density-of-states laboratory for discrete
// Schrodinger operators on lattice boxes.
//
//   doslab <command> --config <path> [--out <path>] [--threads N] [--no-cache]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "doslab/config.hpp"
#include "doslab/runner.hpp"

static int run_main(int argc, char** argv);

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << doslab::detail::error_json(e.what()).dump(2) << "\n";
        return 2;
    }
}

static int run_main(int argc, char** argv) {
    CLI::App app{"finite-volume density-of-states laboratory"};
    app.footer("commands: build count dos-sweep translate-sup construct ucp-probe carleman fit");

    std::string command, config_path, out_path;
    int threads = 0;
    bool no_cache = false;
    app.add_option("command", command, "command to run (must match the config document)")->required();
    app.add_option("--config", config_path, "path to the JSON config document")->required();
    app.add_option("--out", out_path, "output path (overrides config output_path)");
    app.add_option("--threads", threads, "worker threads (overrides config thread_count)");
    app.add_flag("--no-cache", no_cache, "skip the result cache entirely");

    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << doslab::detail::error_json("cannot open config " + config_path).dump(2) << "\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    doslab::ParseResult parsed = doslab::parse_config(buffer.str());
    if (!parsed.ok()) {
        std::cerr << doslab::detail::error_json("config validation failed", parsed.errors).dump(2)
                  << "\n";
        return 1;
    }
    doslab::RunConfig cfg = *parsed.config;
    if (cfg.command != command) {
        std::cerr << doslab::detail::error_json("command line says '" + command +
                                                "' but the config document says '" + cfg.command + "'")
                         .dump(2)
                  << "\n";
        return 1;
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    if (threads > 0) cfg.thread_count = threads;
    if (no_cache) cfg.no_cache = true;
    if (const char* env = std::getenv("DOSLAB_CACHE")) cfg.cache_dir = env;

    doslab::RunOutcome outcome = doslab::run(cfg, &std::cerr);
    if (outcome.exit_code != 0) std::cerr << outcome.error_json;
    return outcome.exit_code;
}
