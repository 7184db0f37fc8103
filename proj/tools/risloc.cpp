// SPDX-License-Identifier: Apache-2.0
//
// risloc: RIS-assisted radio localization simulator and solvers
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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risloc/cli.hpp"
#include "risloc/errors.hpp"

int main(int argc, char** argv)
{
    risloc::RunConfig cfg;
    std::vector<std::string> sigmas;
    std::string grid;

    CLI::App app{"risloc: RIS-assisted localization simulator, solvers and identifiability checks"};
    app.require_subcommand(1);

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", cfg.scenario, "scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--seed", cfg.seed, "64-bit noise seed");
        sub->add_option("--sigma", sigmas, "noise override KIND=VALUE (repeatable)");
        sub->add_option("--out", cfg.out_dir, "output directory (default: CSV to stdout)");
    };

    auto* simulate = app.add_subcommand("simulate", "draw a noisy measurement set");
    common(simulate);
    auto* solve = app.add_subcommand("solve", "estimate the UE state");
    common(solve);
    solve->add_option("--measurements", cfg.measurements, "measurement CSV from 'simulate'")
        ->check(CLI::ExistingFile);
    auto* fim = app.add_subcommand("fim", "Fisher information rank report at the stored UE state");
    common(fim);
    auto* table1 = app.add_subcommand("table1", "reproduce the identifiability table over the gallery");
    common(table1);
    table1->add_option("--gallery", cfg.gallery, "directory of row*.json scenarios")->check(CLI::ExistingDirectory);
    auto* sweep = app.add_subcommand("sweep", "two-RIS beam-sweep localization");
    common(sweep);
    sweep->add_option("--grid", grid, "X0,Y0,X1,Y1,STEP of the search plane");
    sweep->add_option("--snr-db", cfg.snr_db, "peak complex-amplitude SNR");
    sweep->add_option("--beams", cfg.beams, "beams per RIS codebook")->check(CLI::PositiveNumber);
    sweep->add_option("--span", cfg.span_deg, "codebook azimuth span, degrees")->check(CLI::PositiveNumber);
    auto* crb = app.add_subcommand("crb-mc", "Monte-Carlo RMSE against the CRB");
    common(crb);
    crb->add_option("--trials", cfg.trials, "trials per sigma scale")->check(CLI::PositiveNumber);
    crb->add_option("--scales", cfg.scales, "sigma scale factors");

    try {
        app.parse(argc, argv);
        cfg.command = app.get_subcommands().front()->get_name();
        for (const auto& s : sigmas) risloc::parse_sigma_override(cfg, s);
        if (!grid.empty()) cfg.grid = risloc::parse_grid(grid);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const risloc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return risloc::run(cfg, std::cout, std::cerr);
}
