// wpt: batch front end for the differential class-E receiver toolkit.
//
//   wpt <command> [config.ini] [--out DIR] [--seed N]
//
// Exit codes: 0 ok, 1 usage, 2 config, 3 validation, 4 non-convergence, 5 I/O.

#include "wpt/cli/commands.hpp"
#include "wpt/error.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace wpt::cli;

    CLI::App app{"Differential class-E WPT receiver: simulation, design and control"};
    app.require_subcommand(1);

    struct Args {
        std::string config;
        std::string out = ".";
        std::uint64_t seed = 0;
        bool quiet = false;
    };
    std::vector<Args> args(commands().size());

    for (std::size_t i = 0; i < commands().size(); ++i) {
        const CommandInfo& cmd = commands()[i];
        CLI::App* sub = app.add_subcommand(std::string(cmd.name), std::string(cmd.summary));
        sub->add_option("config", args[i].config, "INI config file (defaults apply when omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args[i].out, "directory for the emitted CSV/JSON files")->capture_default_str();
        if (cmd.uses_seed) {
            sub->add_option("--seed", args[i].seed, "seed for the injected comparator noise");
        }
        sub->add_flag("-q,--quiet", args[i].quiet, "suppress the summary lines");
        sub->footer(command_help(cmd));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (std::size_t i = 0; i < commands().size(); ++i) {
        const CommandInfo& cmd = commands()[i];
        CLI::App* sub = app.get_subcommand(std::string(cmd.name));
        if (!sub->parsed()) {
            continue;
        }
        CommandContext ctx;
        try {
            if (!args[i].config.empty()) {
                ctx.config = RunConfig::load(args[i].config);
            }
        } catch (const std::exception& e) {
            std::cerr << cmd.name << ": " << e.what() << '\n';
            return exit_code_for(std::current_exception());
        }
        ctx.out_dir = args[i].out;
        if (cmd.uses_seed && sub->count("--seed") > 0) {
            ctx.seed = args[i].seed;
        }
        ctx.log = args[i].quiet ? nullptr : &std::cout;
        return run_command(cmd, ctx, std::cerr);
    }
    return kExitUsage;
}
