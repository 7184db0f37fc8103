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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "risloc/measurements.hpp"
#include "risloc/signal.hpp"

namespace risloc {

struct RunConfig
{
    std::string command;  // simulate, solve, fim, table1, sweep, crb-mc
    std::string scenario;
    std::uint64_t seed = 1;
    std::map<MeasurementKind, double> sigma_overrides;
    std::string out_dir;  // empty: CSV to stdout
    std::optional<GridSpec> grid;
    int trials = 100;

    std::string gallery;       // table1; defaults to the shipped gallery
    std::string measurements;  // solve: CSV from simulate instead of a fresh draw
    double snr_db = 20.0;      // sweep
    int beams = 63;            // sweep
    double span_deg = 120.0;   // sweep
    std::vector<double> scales{0.01, 0.03, 0.1, 0.3, 1.0};  // crb-mc
};

/// "KIND=VALUE" into cfg.sigma_overrides; throws ParseError.
void parse_sigma_override(RunConfig& cfg, const std::string& text);
/// "X0,Y0,X1,Y1,STEP"; throws ParseError.
GridSpec parse_grid(const std::string& text);

NoiseSigmas effective_sigmas(const RunConfig& cfg);
std::string default_gallery_dir();

// Each command writes its CSV (with "#" metadata) and a short summary on `log`; returns the exit code.
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_fim(const RunConfig& cfg, std::ostream& log);
int cmd_table1(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_crb_mc(const RunConfig& cfg, std::ostream& log);

/// Dispatches on cfg.command; library errors become exit code 2 with the message on `err`.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace risloc
