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

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "risloc/cli.hpp"
#include "risloc/errors.hpp"
#include "support.hpp"

using namespace risloc;
using namespace risloc::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("risloc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

RunConfig config(const std::string& cmd, int row, const fs::path& out)
{
    RunConfig c;
    c.command = cmd;
    c.scenario = row > 0 ? gallery_path(kRowFiles[row - 1]) : "";
    c.out_dir = out.string();
    return c;
}

}  // namespace

TEST(Cli, SimulateIsDeterministicPerSeed)
{
    TempDir t;
    std::stringstream log, err;
    RunConfig c = config("simulate", 1, t.path);
    ASSERT_EQ(run(c, log, err), 0) << err.str();
    const std::string a = slurp(t.path / "measurements.csv");
    ASSERT_EQ(run(c, log, err), 0);
    EXPECT_EQ(a, slurp(t.path / "measurements.csv"));
    c.seed = 2;
    ASSERT_EQ(run(c, log, err), 0);
    EXPECT_NE(data_lines(a), data_lines(slurp(t.path / "measurements.csv")));
    EXPECT_NE(a.find("# seed=1"), std::string::npos);
}

TEST(Cli, ZeroSigmaReproducesForwardModels)
{
    TempDir t;
    std::stringstream log, err;
    RunConfig c = config("simulate", 2, t.path);
    for (const char* k : {"ToA=0", "TDoA=0", "RTT=0", "AoD=0", "AoA=0", "Doppler=0"}) parse_sigma_override(c, k);
    ASSERT_EQ(run(c, log, err), 0) << err.str();
    const ScenarioFile f = load_row(2);
    std::ifstream in(t.path / "measurements.csv");
    const MeasurementSet m = read_csv(in, f.scenario);
    ASSERT_FALSE(m.items.empty());
    EXPECT_LT(residuals(m, f.scenario, *f.ue).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cli, BlockedLinksProduceNoRows)
{
    TempDir t;
    ScenarioFile f = load_row(2);
    f.scenario.los_blocked.insert(f.scenario.bss[0].id);
    save(f, (t.path / "blocked.json").string());
    std::stringstream log, err;
    RunConfig c = config("simulate", 0, t.path);
    c.scenario = (t.path / "blocked.json").string();
    ASSERT_EQ(run(c, log, err), 0) << err.str();
    std::ifstream in(t.path / "measurements.csv");
    const MeasurementSet m = read_csv(in, f.scenario);
    for (const auto& x : m.items) EXPECT_NE(x.path.type, Path::Type::Direct);
}

TEST(Cli, NarrowbandDelayIsRejected)
{
    TempDir t;
    ScenarioFile f = load_row(1);
    f.scenario.signaling = Signaling::narrowband();
    f.scenario.measurement_mix = {MeasurementKind::TDoA};
    save(f, (t.path / "nb.json").string());
    std::stringstream log, err;
    RunConfig c = config("solve", 0, t.path);
    c.scenario = (t.path / "nb.json").string();
    EXPECT_NE(run(c, log, err), 0);
    EXPECT_NE(err.str().find("ToA-class measurement requires WB"), std::string::npos) << err.str();
}

TEST(Cli, SolveRoundTripsSimulatedMeasurements)
{
    TempDir t;
    std::stringstream log, err;
    RunConfig sim = config("simulate", 7, t.path);
    ASSERT_EQ(run(sim, log, err), 0) << err.str();
    RunConfig c = config("solve", 7, t.path);
    c.measurements = (t.path / "measurements.csv").string();
    ASSERT_EQ(run(c, log, err), 0) << err.str();
    const auto lines = data_lines(slurp(t.path / "solve.csv"));
    ASSERT_FALSE(lines.empty());
    EXPECT_EQ(lines[0], "component,value,residual,converged,candidate_rank");
}

TEST(Cli, Table1ReportsAllRows)
{
    TempDir t;
    std::stringstream log, err;
    RunConfig c = config("table1", 0, t.path);
    ASSERT_EQ(run(c, log, err), 0) << err.str();
    EXPECT_NE(log.str().find("10/10 rows match"), std::string::npos) << log.str();
    EXPECT_EQ(data_lines(slurp(t.path / "table1.csv")).size(), 11u);
}

TEST(Cli, FimHeader)
{
    TempDir t;
    std::stringstream log, err;
    ASSERT_EQ(run(config("fim", 3, t.path), log, err), 0) << err.str();
    EXPECT_EQ(data_lines(slurp(t.path / "fim.csv"))[0], "block,size,identifiable_dim,crb_diag");
}

TEST(Cli, CrbMonteCarloHeader)
{
    TempDir t;
    std::stringstream log, err;
    RunConfig c = config("crb-mc", 3, t.path);
    c.trials = 5;
    c.scales = {0.1, 0.3};
    ASSERT_EQ(run(c, log, err), 0) << err.str();
    const auto lines = data_lines(slurp(t.path / "crb_mc.csv"));
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "scale,rmse_m,crb_m,ratio,trials,failures");
}

TEST(Cli, ArgumentParsing)
{
    RunConfig c;
    parse_sigma_override(c, "AoD=0.02");
    EXPECT_DOUBLE_EQ(c.sigma_overrides.at(MeasurementKind::AoD), 0.02);
    EXPECT_DOUBLE_EQ(effective_sigmas(c)[MeasurementKind::AoD], 0.02);
    EXPECT_THROW(parse_sigma_override(c, "AoD"), ParseError);
    EXPECT_THROW(parse_sigma_override(c, "AoD=-1"), ParseError);
    EXPECT_THROW(parse_sigma_override(c, "AoD=x"), ParseError);
    EXPECT_THROW(parse_sigma_override(c, "Foo=1"), Error);
    const GridSpec g = parse_grid("0,0,1,2,0.5");
    EXPECT_DOUBLE_EQ(g.x1, 1.0);
    EXPECT_DOUBLE_EQ(g.step, 0.5);
    EXPECT_THROW(parse_grid("0,0,1"), ParseError);
    EXPECT_THROW(parse_grid("1,0,0,1,0.1"), ParseError);
    EXPECT_THROW(parse_grid("0,0,1,1,0"), ParseError);
}

TEST(Cli, ErrorsBecomeExitCodes)
{
    std::stringstream log, err;
    RunConfig c;
    c.command = "solve";
    EXPECT_EQ(run(c, log, err), 2);
    EXPECT_NE(err.str().find("--scenario"), std::string::npos);
    c.scenario = "/nonexistent.json";
    EXPECT_EQ(run(c, log, err), 2);
}

TEST(Cli, ExecutableRuns)
{
    TempDir t;
    const std::string cmd = std::string(RISLOC_TOOL) + " fim --scenario " + gallery_path(kRowFiles[0]) +
                            " --out " + t.path.string() + " > /dev/null 2>&1";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(t.path / "fim.csv"));
    const std::string bad = std::string(RISLOC_TOOL) + " simulate --scenario x.json --sigma AoD > /dev/null 2>&1";
    EXPECT_NE(std::system(bad.c_str()), 0);
}
