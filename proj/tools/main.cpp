// biharmonic-lab: batch front-end. See README.md for the config schema.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "biharmonic/parallel.hpp"
#include "lab/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"biharmonic-lab: 4NLS simulation and verification experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool plot = false;

    for (const char* name : {"simulate", "alpha", "norms", "sweep-strichartz", "sweep-bilinear", "sweep-l4",
                             "conservation-report"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "RNG seed (overrides the config)");
        sub->add_option("--threads", threads, "worker threads (default: BIHARMONIC_LAB_THREADS or all cores)");
        sub->add_flag("--plot", plot, "also write SVG plots");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lab::kBadConfig;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const auto which = lab::parse_subcommand(sub->get_name());

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << config_path << ": cannot open config\n";
        return lab::kBadConfig;
    }
    std::ostringstream text;
    text << in.rdbuf();

    if (threads > 0) biharmonic::set_thread_count(threads);
    lab::RunOptions options;
    options.out = out_dir;
    options.plot = plot;
    if (sub->count("--seed")) options.seed = seed;
    return lab::run(*which, text.str(), config_path, options, std::cout, std::cerr);
}
