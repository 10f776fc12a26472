// Copyright 2026 The rcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rcm: command-line front end for the collision-model simulations.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rcm/cli.hpp"

namespace {

struct Flags {
    std::optional<std::string> config;
    std::map<std::string, std::optional<std::string>> values;
};

void add_run_flags(CLI::App &sub, Flags &flags) {
    sub.add_option("--config", flags.config, "key=value file; flags given here take precedence");
    const std::pair<const char *, const char *> opts[] = {
        {"seed", "master seed, decimal or 0x-hex (default 1)"},
        {"steps", "collisions per trajectory (default 40)"},
        {"trajectories", "ensemble size (default 10000)"},
        {"initial", "product | entangled | \"(re,im) x8\" | @file"},
        {"policy", "random | alternating | pair list like \"01,02\" | @file"},
        {"sampler", "hurwitz | ginibre"},
        {"fit-window", "fit window a:b (default 1:15)"},
        {"bins", "histogram bins on [0,1] (default 40)"},
        {"out", "output directory (default .)"},
        {"workers", "worker threads (default 1)"},
        {"oracle-samples", "random states for the equilibrium oracle (default 100000)"},
    };
    for (const auto &[key, help] : opts) {
        sub.add_option(std::string("--") + key, flags.values[key], help);
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Random collision model of a qubit with a two-qubit environment"};
    app.require_subcommand(1);
    Flags flags;
    for (const auto &name : rcm::cli::command_names()) {
        add_run_flags(*app.add_subcommand(name, "run the " + name + " command"), flags);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        rcm::cli::RunConfig cfg;
        if (flags.config) {
            rcm::cli::load_config_file(cfg, *flags.config);
        }
        for (const auto &[key, value] : flags.values) {
            if (value) {
                rcm::cli::apply_setting(cfg, key, *value);
            }
        }
        const auto result = rcm::cli::run_command(command, cfg);
        for (const auto &note : result.notes) {
            std::cout << note << '\n';
        }
        for (const auto &f : result.files) {
            std::cout << "wrote " << f.string() << '\n';
        }
    } catch (const std::exception &e) {
        std::cerr << "rcm " << command << ": " << e.what() << '\n';
        return rcm::cli::exit_code_for(e);
    }
    return 0;
}
