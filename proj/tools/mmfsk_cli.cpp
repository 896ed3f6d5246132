// SPDX-License-Identifier: Apache-2.0
//
// mmfsk - multimodal frequency-shift-keying MIMO radar depth imaging
// Copyright (C) 2026 The mmfsk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mmfsk/mmfsk.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace
{
    struct CommandArgs
    {
        std::string config;
        std::vector<std::string> overrides;
        std::string output_dir;
        unsigned workers = 0;
        long long seed = -1;
    };

    void add_common(CLI::App *cmd, CommandArgs &args)
    {
        cmd->add_option("config", args.config, "Experiment configuration (JSON)")->required();
        cmd->add_option("--set", args.overrides, "Override a configuration field, e.g. --set scene.depth=0.3");
        cmd->add_option("-o,--output-dir", args.output_dir,
                        "Output directory (default: $MMFSK_OUTPUT_DIR, then the configured one)");
        cmd->add_option("-j,--workers", args.workers, "Worker threads (0: automatic)");
        cmd->add_option("--seed", args.seed, "Override the configured seed")->check(CLI::NonNegativeNumber);
    }

    int run(const std::string &command, const CommandArgs &args)
    {
        std::vector<std::string> overrides = args.overrides;
        if (args.seed >= 0)
            overrides.push_back("seed=" + std::to_string(args.seed));
        std::vector<const char *> raw;
        for (const std::string &o : overrides)
            raw.push_back(o.c_str());

        std::string out_dir = args.output_dir;
        if (out_dir.empty())
            if (const char *env = std::getenv("MMFSK_OUTPUT_DIR"))
                out_dir = env;

        char *summary = nullptr;
        const mmfsk_status st =
            mmfsk_run_command(command.c_str(), args.config.c_str(), raw.data(), raw.size(),
                              out_dir.empty() ? nullptr : out_dir.c_str(), args.workers, &summary);
        if (st != MMFSK_OK)
        {
            std::cerr << "mmfsk " << command << ": " << mmfsk_status_name(st) << " error: " << mmfsk_last_error()
                      << '\n';
            return mmfsk_exit_code(st);
        }
        std::cout << summary;
        mmfsk_string_free(summary);
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"MM-2FSK MIMO radar depth imaging: simulation, reconstruction and evaluation"};
    app.set_version_flag("--version", std::string("mmfsk ") + mmfsk_version());
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Simulate the baseband tensor and ground truth"},
        {"prior", "Build the per-pixel depth prior"},
        {"reconstruct", "Reconstruct depth images for every configured method"},
        {"eval", "Evaluate reconstructions against ground truth"},
        {"sweep", "Run the full pipeline over frequency configurations and seeds"},
        {"report", "Summarize evaluation and sweep results"},
    };
    std::vector<CommandArgs> args(commands.size());
    std::vector<CLI::App *> subs;
    for (std::size_t i = 0; i < commands.size(); ++i)
    {
        CLI::App *cmd = app.add_subcommand(commands[i].first, commands[i].second);
        add_common(cmd, args[i]);
        subs.push_back(cmd);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return run(commands[i].first, args[i]);
    return 1;
}
