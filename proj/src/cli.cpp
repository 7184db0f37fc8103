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

#include "risloc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "risloc/constants.hpp"
#include "risloc/errors.hpp"
#include "risloc/identifiability.hpp"
#include "risloc/solvers.hpp"

namespace fs = std::filesystem;

namespace risloc {

namespace {

enum class Verbosity { Quiet, Info, Debug };

Verbosity verbosity()
{
    const char* v = std::getenv("RISLOC_LOG");
    if (!v) return Verbosity::Info;
    const std::string s(v);
    if (s == "quiet" || s == "0" || s == "error") return Verbosity::Quiet;
    if (s == "debug" || s == "2") return Verbosity::Debug;
    return Verbosity::Info;
}

// Output sink: a file under out_dir, or stdout.
class Sink
{
  public:
    Sink(const RunConfig& cfg, const std::string& name)
    {
        if (cfg.out_dir.empty()) return;
        fs::create_directories(cfg.out_dir);
        path_ = (fs::path(cfg.out_dir) / name).string();
        file_ = std::make_unique<std::ofstream>(path_);
        if (!*file_) throw Error("cannot write '" + path_ + "'");
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
};

void metadata(std::ostream& os, const RunConfig& cfg)
{
    os << "# risloc " << cfg.command << '\n';
    if (!cfg.scenario.empty()) os << "# scenario=" << cfg.scenario << '\n';
    os << "# seed=" << cfg.seed << '\n';
    const NoiseSigmas s = effective_sigmas(cfg);
    char buf[200];
    std::snprintf(buf, sizeof buf, "# sigma ToA=%g TDoA=%g RTT=%g AoD=%g AoA=%g Doppler=%g\n", s.toa, s.tdoa, s.rtt,
                  s.aod, s.aoa, s.doppler);
    os << buf;
}

ScenarioFile load_valid(const RunConfig& cfg)
{
    if (cfg.scenario.empty()) throw Error("--scenario is required for '" + cfg.command + "'");
    ScenarioFile sf = load(cfg.scenario);
    if (auto v = validate(sf.scenario); !v.empty())
        throw Infeasible("invalid scenario " + cfg.scenario + ":\n" + format_violations(v));
    return sf;
}

const UeState& require_ue(const ScenarioFile& sf, const RunConfig& cfg)
{
    if (!sf.ue) throw Error("'" + cfg.command + "' needs the true UE state ('ue') in the scenario file");
    return *sf.ue;
}

void done(std::ostream& log, Sink& sink)
{
    if (!sink.path().empty() && verbosity() != Verbosity::Quiet) log << "wrote " << sink.path() << '\n';
}

}  // namespace

void parse_sigma_override(RunConfig& cfg, const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("sigma override must be KIND=VALUE, got '" + text + "'");
    const MeasurementKind k = measurement_kind_from_string(text.substr(0, eq));
    try {
        std::size_t used = 0;
        const double v = std::stod(text.substr(eq + 1), &used);
        if (used != text.size() - eq - 1 || !(v >= 0.0)) throw std::invalid_argument("bad");
        cfg.sigma_overrides[k] = v;
    } catch (const std::logic_error&) {
        throw ParseError("sigma value must be a non-negative number, got '" + text.substr(eq + 1) + "'");
    }
}

GridSpec parse_grid(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw ParseError("grid values must be numbers, got '" + item + "'");
        }
    }
    if (v.size() != 5) throw ParseError("grid must be X0,Y0,X1,Y1,STEP");
    GridSpec g;
    g.x0 = v[0], g.y0 = v[1], g.x1 = v[2], g.y1 = v[3], g.step = v[4];
    if (!(g.step > 0.0) || g.cols() < 1 || g.rows() < 1)
        throw ParseError("grid needs X1 > X0, Y1 > Y0 and a positive STEP");
    return g;
}

NoiseSigmas effective_sigmas(const RunConfig& cfg)
{
    NoiseSigmas s;
    for (const auto& [k, v] : cfg.sigma_overrides) s[k] = v;
    return s;
}

std::string default_gallery_dir()
{
    if (const char* g = std::getenv("RISLOC_GALLERY")) return g;
#ifdef RISLOC_GALLERY_DIR
    return RISLOC_GALLERY_DIR;
#else
    return "gallery";
#endif
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log)
{
    const ScenarioFile sf = load_valid(cfg);
    const MeasurementSet m = generate(sf.scenario, require_ue(sf, cfg), effective_sigmas(cfg), cfg.seed);
    Sink sink(cfg, "measurements.csv");
    metadata(sink.os(), cfg);
    write_csv(sink.os(), m, sf.scenario);
    if (verbosity() != Verbosity::Quiet) {
        log << m.items.size() << " measurements:";
        for (auto k : {MeasurementKind::ToA, MeasurementKind::TDoA, MeasurementKind::RTT, MeasurementKind::AoD,
                       MeasurementKind::AoA, MeasurementKind::Doppler})
            if (m.count(k)) log << ' ' << to_string(k) << '=' << m.count(k);
        log << '\n';
    }
    done(log, sink);
    return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log)
{
    const ScenarioFile sf = load_valid(cfg);
    SolveRequest req;
    req.scenario = sf.scenario;
    req.unknowns = scenario_mask(sf.scenario);
    req.fallback_sigmas = effective_sigmas(cfg);
    if (!cfg.measurements.empty()) {
        std::ifstream in(cfg.measurements);
        if (!in) throw Error("cannot open measurements '" + cfg.measurements + "'");
        req.measurements = read_csv(in, sf.scenario);
    } else {
        req.measurements = generate(sf.scenario, require_ue(sf, cfg), effective_sigmas(cfg), cfg.seed);
    }
    const SolveResult r = solve(req);

    Sink sink(cfg, "solve.csv");
    metadata(sink.os(), cfg);
    sink.os() << "# method=" << r.method << " iterations=" << r.iterations << " velocity_dim=" << r.velocity_dim
              << '\n';
    for (const auto& w : r.warnings) sink.os() << "# warning: " << w << '\n';
    write_result_csv(sink.os(), r);

    if (verbosity() != Verbosity::Quiet) {
        char buf[200];
        const Vec3& p = r.estimate.position;
        std::snprintf(buf, sizeof buf, "%s: position (%.6f, %.6f, %.6f), residual %.3g, %s, %zu candidate(s)\n",
                      r.method.c_str(), p.x(), p.y(), p.z(), r.residual, r.converged ? "converged" : "NOT converged",
                      r.candidates.size());
        log << buf;
        if (sf.ue && cfg.measurements.empty()) {
            std::snprintf(buf, sizeof buf, "position error %.3g m\n", (p - sf.ue->position).norm());
            log << buf;
        }
        for (const auto& w : r.warnings) log << "warning: " << w << '\n';
    }
    done(log, sink);
    return r.converged ? 0 : 1;
}

int cmd_fim(const RunConfig& cfg, std::ostream& log)
{
    const ScenarioFile sf = load_valid(cfg);
    const IdentReport r = ident_report(fim(sf.scenario, require_ue(sf, cfg), effective_sigmas(cfg)));
    Sink sink(cfg, "fim.csv");
    metadata(sink.os(), cfg);
    write_report_csv(sink.os(), r);
    if (verbosity() != Verbosity::Quiet)
        log << to_string(r.verdict) << ": "
            << describe_state(r.dim(Block::Position), r.dim(Block::Clock), r.dim(Block::Velocity),
                              r.dim(Block::Orientation))
            << " (rank " << r.total_rank << " of " << r.masked_dim << ")\n";
    done(log, sink);
    return 0;
}

int cmd_table1(const RunConfig& cfg, std::ostream& log)
{
    const std::string dir = cfg.gallery.empty() ? default_gallery_dir() : cfg.gallery;
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (e.path().extension() == ".json" && name.rfind("row", 0) == 0) files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no row*.json scenarios in '" + dir + "'");

    std::vector<ScenarioFile> gallery;
    for (const auto& f : files) gallery.push_back(load(f));
    const auto rows = reproduce_table(gallery, effective_sigmas(cfg));

    Sink sink(cfg, "table1.csv");
    metadata(sink.os(), cfg);
    sink.os() << "# gallery=" << dir << '\n';
    write_table_csv(sink.os(), rows);
    if (verbosity() != Verbosity::Quiet) log << format_table(rows);
    done(log, sink);
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.match; }) && rows.size() == 10 ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log)
{
    const ScenarioFile sf = load_valid(cfg);
    const UeState& truth = require_ue(sf, cfg);
    const Scenario& s = sf.scenario;
    if (s.riss.size() < 2) throw Infeasible("sweep needs a scenario with two RISs");

    std::vector<Codebook> books;
    for (const auto& r : s.riss)
        books.push_back(make_codebook(r, cfg.beams, cfg.span_deg * kPi / 180.0, s.lambda(),
                                      s.bss.empty() ? std::nullopt : std::optional<Vec3>(s.bss.front().position)));

    GridSpec grid;
    if (cfg.grid) {
        grid = *cfg.grid;
    } else {
        // anchor bounding box with a 20 cm margin
        Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
        for (const auto& b : s.bss) lo = lo.cwiseMin(b.position), hi = hi.cwiseMax(b.position);
        for (const auto& r : s.riss) lo = lo.cwiseMin(r.center), hi = hi.cwiseMax(r.center);
        grid.x0 = lo.x() - 0.2, grid.y0 = lo.y() - 0.2, grid.x1 = hi.x() + 0.2, grid.y1 = hi.y() + 0.2;
        grid.step = 0.01;
    }
    grid.z = truth.position.z();

    const double sigma = sweep_peak_amplitude(s, truth, books) * std::pow(10.0, -cfg.snr_db / 20.0);
    const PowerMap map = beam_sweep_estimate(s, truth, books, grid, sigma, cfg.seed);

    Sink sink(cfg, "power_map.csv");
    metadata(sink.os(), cfg);
    char buf[200];
    std::snprintf(buf, sizeof buf, "# snr_db=%g beams=%d span_deg=%g estimate=%.4f,%.4f error_m=%.4f\n", cfg.snr_db,
                  cfg.beams, cfg.span_deg, map.estimate.x(), map.estimate.y(),
                  (map.estimate - truth.position).norm());
    sink.os() << buf;
    write_power_map_csv(sink.os(), map);
    if (verbosity() != Verbosity::Quiet) {
        std::snprintf(buf, sizeof buf, "estimate (%.3f, %.3f), error %.1f cm\n", map.estimate.x(), map.estimate.y(),
                      100.0 * (map.estimate - truth.position).norm());
        log << buf;
    }
    if (!cfg.out_dir.empty()) {
        for (std::size_t r = 0; r < books.size(); ++r) {
            std::ofstream cb(fs::path(cfg.out_dir) / ("codebook_" + s.riss[r].id + ".csv"));
            metadata(cb, cfg);
            write_codebook_csv(cb, books[r]);
        }
    }
    done(log, sink);
    return 0;
}

int cmd_crb_mc(const RunConfig& cfg, std::ostream& log)
{
    const ScenarioFile sf = load_valid(cfg);
    require_ue(sf, cfg);
    const CrbStudy st = crb_monte_carlo(sf, cfg.scales, cfg.trials, cfg.seed, effective_sigmas(cfg));

    Sink sink(cfg, "crb_mc.csv");
    metadata(sink.os(), cfg);
    char buf[200];
    std::snprintf(buf, sizeof buf, "# trials=%d slope=%.4f\n", cfg.trials, st.slope);
    sink.os() << buf << "scale,rmse_m,crb_m,ratio,trials,failures\n";
    for (const auto& p : st.points) {
        std::snprintf(buf, sizeof buf, "%.6g,%.9g,%.9g,%.6g,%d,%d\n", p.scale, p.rmse, p.crb, p.rmse / p.crb,
                      p.trials, p.failures);
        sink.os() << buf;
    }
    if (verbosity() != Verbosity::Quiet) {
        std::snprintf(buf, sizeof buf, "log-log slope %.3f over %zu sigma scales\n", st.slope, st.points.size());
        log << buf;
    }
    done(log, sink);
    return 0;
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err)
{
    try {
        if (cfg.command == "simulate") return cmd_simulate(cfg, log);
        if (cfg.command == "solve") return cmd_solve(cfg, log);
        if (cfg.command == "fim") return cmd_fim(cfg, log);
        if (cfg.command == "table1") return cmd_table1(cfg, log);
        if (cfg.command == "sweep") return cmd_sweep(cfg, log);
        if (cfg.command == "crb-mc") return cmd_crb_mc(cfg, log);
        err << "error: unknown command '" << cfg.command << "'\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace risloc
