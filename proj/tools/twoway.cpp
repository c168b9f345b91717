#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "twoway/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace twoway::cli;
    configure_logging();

    CLI::App app{"Two-way coded feedback loops: analysis, coding design, attack and simulation runs"};
    app.require_subcommand(1);
    RunOptions opts;
    std::string config;
    std::string command;

    const std::pair<const char*, const char*> commands[] = {
        {"analyze", "attacker's view, zero/pole relocation and closed-loop maps"},
        {"design", "coding from two stabilizing static output feedback gains"},
        {"attack", "synthesize a zero-dynamics attack and run the residual detector"},
        {"simulate", "time-domain run, optionally with consistency checks"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("config", config, "scenario file (JSON)")->required();
        sub->add_option("--out", opts.out_dir, "output directory for CSV and report files");
        sub->add_flag("--dump-config", opts.dump_config, "print the normalized scenario file and exit");
        sub->add_option("--seed", opts.seed, "seed for randomized checks");
        sub->callback([&command, name = name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_schema;
    }
    return run_command(command, config, opts, std::cout, std::cerr);
}
