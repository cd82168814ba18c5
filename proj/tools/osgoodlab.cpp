#include "osgoodlab/harness.hpp"
#include "osgoodlab/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"osgoodlab: conditional-stability experiments for backward parabolic equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", osgoodlab::software_version);

    std::string config_path;
    std::string out_dir = ".";
    std::size_t threads = 0;
    std::uint64_t seed = 0;

    for (const auto& kind : osgoodlab::experiment_kinds()) {
        auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
        sub->add_option("--config", config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (default: OSGOODLAB_THREADS or 1)");
        sub->add_option("--seed", seed, "reserved for randomized grids");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : osgoodlab::exit_validation;
    }

    if (threads == 0) {
        if (const char* env = std::getenv("OSGOODLAB_THREADS")) {
            try {
                threads = std::stoul(env);
            } catch (const std::exception&) {
                std::cerr << "OSGOODLAB_THREADS: not a number: " << env << "\n";
                return osgoodlab::exit_validation;
            }
        }
    }
    if (threads == 0) threads = 1;

    const std::string kind = app.get_subcommands().front()->get_name();
    std::string text;
    try {
        text = osgoodlab::io::read_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return osgoodlab::exit_validation;
    }

    const auto rep = osgoodlab::run_config_text(text, config_path, {out_dir, threads, seed}, kind);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& d : rep.diagnostics) std::cerr << d << "\n";
    if (rep.exit_code == osgoodlab::exit_success)
        std::cout << rep.csv_path.string() << "\n" << rep.manifest_path.string() << "\n";
    return rep.exit_code;
}
