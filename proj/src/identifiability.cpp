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

#include "risloc/identifiability.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace risloc {

std::string_view to_string(Block b)
{
    switch (b) {
    case Block::Position: return "position";
    case Block::Clock: return "clock";
    case Block::Velocity: return "velocity";
    case Block::Orientation: return "orientation";
    }
    return "?";
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Identifiable: return "identifiable";
    case Verdict::Ambiguous: return "ambiguous";
    case Verdict::NonIdentifiable: return "non-identifiable";
    }
    return "?";
}

bool UnknownMask::has(Block b) const
{
    switch (b) {
    case Block::Position: return position;
    case Block::Clock: return clock;
    case Block::Velocity: return velocity;
    case Block::Orientation: return orientation;
    }
    return false;
}

UnknownMask scenario_mask(const Scenario& s)
{
    UnknownMask m;
    m.clock = s.has(MeasurementKind::ToA);
    m.velocity = s.has(MeasurementKind::Doppler);
    m.orientation = s.has(MeasurementKind::AoA) && s.ue_antenna.is_array;
    return m;
}

std::vector<BlockIndex> block_layout(const UnknownMask& m)
{
    std::vector<BlockIndex> out;
    int off = 0;
    if (m.position) out.push_back({Block::Position, off, 3}), off += 3;
    if (m.clock) out.push_back({Block::Clock, off, 1}), off += 1;
    if (m.velocity) out.push_back({Block::Velocity, off, 3}), off += 3;
    if (m.orientation) out.push_back({Block::Orientation, off, 3}), off += 3;
    return out;
}

Eigen::VectorXd pack(const UeState& u, const UnknownMask& m)
{
    Eigen::VectorXd x(m.dim());
    Eigen::Index i = 0;
    if (m.position) x.segment<3>(i) = u.position, i += 3;
    if (m.clock) x[i++] = u.clock_bias;
    if (m.velocity) x.segment<3>(i) = u.velocity, i += 3;
    if (m.orientation) x.segment<3>(i) = Vec3(u.orientation.alpha, u.orientation.beta, u.orientation.gamma);
    return x;
}

UeState unpack(const Eigen::VectorXd& x, const UnknownMask& m, UeState base)
{
    Eigen::Index i = 0;
    if (m.position) base.position = x.segment<3>(i), i += 3;
    if (m.clock) base.clock_bias = x[i++];
    if (m.velocity) base.velocity = x.segment<3>(i), i += 3;
    if (m.orientation) base.orientation = {x[i], x[i + 1], x[i + 2]};
    return base;
}

namespace {

// Stacked predictions in residual layout, plus a flag per row marking azimuths.
Eigen::VectorXd stacked_predictions(const std::vector<Measurement>& plan, const Scenario& s, const UeState& u)
{
    std::vector<double> v;
    for (const auto& m : plan) {
        const Eigen::Vector2d p = predict(m, s, u);
        v.push_back(p[0]);
        if (m.is_angle()) v.push_back(p[1]);
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct RowInfo
{
    const Measurement* m;
    bool azimuth;
};

std::vector<RowInfo> row_info(const std::vector<Measurement>& plan)
{
    std::vector<RowInfo> rows;
    for (const auto& m : plan) {
        rows.push_back({&m, m.is_angle()});
        if (m.is_angle()) rows.push_back({&m, false});
    }
    return rows;
}

Eigen::VectorXd jacobi_scale(const Eigen::MatrixXd& f)
{
    Eigen::VectorXd d(f.rows());
    for (Eigen::Index i = 0; i < f.rows(); ++i) d[i] = f(i, i) > 0.0 ? std::sqrt(f(i, i)) : 1.0;
    return d;
}

Eigen::VectorXd sym_singular_values(const Eigen::MatrixXd& f)
{
    if (f.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (f + f.transpose()), Eigen::EigenvaluesOnly);
    Eigen::VectorXd sv = es.eigenvalues().cwiseAbs();
    std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
    return sv;
}

int count_above(const Eigen::VectorXd& sv, double threshold)
{
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv[i] > threshold;
    return r;
}

std::string measurement_name(const Measurement& m, const Scenario& s)
{
    return std::string(to_string(m.kind)) + "@" + path_label(m.path, s);
}

}  // namespace

Eigen::MatrixXd measurement_jacobian(const std::vector<Measurement>& plan, const Scenario& s, const UeState& u,
                                     const UnknownMask& mask)
{
    const Eigen::VectorXd x0 = pack(u, mask);
    const auto rows = row_info(plan);
    Eigen::MatrixXd j(static_cast<Eigen::Index>(rows.size()), x0.size());
    for (Eigen::Index c = 0; c < x0.size(); ++c) {
        const double h = std::max(1e-6 * std::abs(x0[c]), 1e-9);
        Eigen::VectorXd xp = x0, xm = x0;
        xp[c] += h;
        xm[c] -= h;
        const Eigen::VectorXd fp = stacked_predictions(plan, s, unpack(xp, mask, u));
        const Eigen::VectorXd fm = stacked_predictions(plan, s, unpack(xm, mask, u));
        for (Eigen::Index r = 0; r < j.rows(); ++r) {
            double diff = fp[r] - fm[r];
            if (rows[static_cast<std::size_t>(r)].azimuth) diff = wrap_angle(diff);
            j(r, c) = diff / (2.0 * h);
            if (!std::isfinite(j(r, c)))
                throw Error("non-finite Jacobian entry for measurement " +
                            measurement_name(*rows[static_cast<std::size_t>(r)].m, s));
        }
    }
    return j;
}

Fim fim(const Scenario& s, const UeState& u, const NoiseSigmas& sigmas)
{
    return fim(s, u, sigmas, scenario_mask(s));
}

Fim fim(const Scenario& s, const UeState& u, const NoiseSigmas& sigmas, const UnknownMask& mask)
{
    if (auto v = validate(s); !v.empty()) throw Infeasible("invalid scenario:\n" + format_violations(v));
    const auto plan = measurement_plan(s);
    Fim f;
    f.mask = mask;
    f.blocks = block_layout(mask);
    f.state = u;
    f.matrix = Eigen::MatrixXd::Zero(mask.dim(), mask.dim());
    if (plan.empty()) return f;

    const Eigen::MatrixXd j = measurement_jacobian(plan, s, u, mask);
    Eigen::VectorXd w(j.rows());
    Eigen::Index r = 0;
    for (const auto& m : plan) {
        const double sg = sigmas[m.kind];
        if (!(sg > 0.0)) throw Error("sigma for " + std::string(to_string(m.kind)) + " must be positive");
        for (int k = 0; k < m.dim(); ++k) w[r++] = 1.0 / (sg * sg);
    }
    f.matrix = j.transpose() * w.asDiagonal() * j;
    f.matrix = 0.5 * (f.matrix + f.matrix.transpose());
    return f;
}

int scaled_rank(const Eigen::MatrixXd& f, double rel_tol)
{
    if (f.rows() == 0) return 0;
    const Eigen::VectorXd d = jacobi_scale(f);
    const Eigen::MatrixXd fs = d.cwiseInverse().asDiagonal() * f * d.cwiseInverse().asDiagonal();
    const Eigen::VectorXd sv = sym_singular_values(fs);
    if (sv.size() == 0 || sv[0] <= 0.0) return 0;
    return count_above(sv, rel_tol * sv[0]);
}

std::vector<int> block_dims(const Eigen::MatrixXd& f, const std::vector<BlockIndex>& blocks, double rel_tol)
{
    std::vector<int> dims;
    if (f.rows() == 0) {
        dims.assign(blocks.size(), 0);
        return dims;
    }
    const Eigen::VectorXd d = jacobi_scale(f);
    const Eigen::MatrixXd fs = d.cwiseInverse().asDiagonal() * f * d.cwiseInverse().asDiagonal();
    for (const auto& b : blocks) {
        std::vector<Eigen::Index> mine, others;
        for (Eigen::Index i = 0; i < fs.rows(); ++i)
            (i >= b.offset && i < b.offset + b.size ? mine : others).push_back(i);
        const auto nb = static_cast<Eigen::Index>(mine.size());
        const auto no = static_cast<Eigen::Index>(others.size());
        Eigen::MatrixXd fbb(nb, nb), fbo(nb, no), foo(no, no);
        for (Eigen::Index a = 0; a < nb; ++a) {
            for (Eigen::Index c = 0; c < nb; ++c) fbb(a, c) = fs(mine[a], mine[c]);
            for (Eigen::Index c = 0; c < no; ++c) fbo(a, c) = fs(mine[a], others[c]);
        }
        for (Eigen::Index a = 0; a < no; ++a)
            for (Eigen::Index c = 0; c < no; ++c) foo(a, c) = fs(others[a], others[c]);

        // Equivalent FIM of the block. Eigenvalues count when they exceed rel_tol
        // times the largest one and sit above roundoff relative to the block's
        // own (unit) diagonal.
        Eigen::MatrixXd efim = fbb;
        if (no > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(foo);
            const Eigen::VectorXd ev = es.eigenvalues();
            const double top = ev.cwiseAbs().maxCoeff();
            Eigen::VectorXd inv = Eigen::VectorXd::Zero(no);
            for (Eigen::Index i = 0; i < no; ++i)
                if (ev[i] > rel_tol * top) inv[i] = 1.0 / ev[i];
            const Eigen::MatrixXd q = fbo * es.eigenvectors();
            efim -= q * inv.asDiagonal() * q.transpose();
        }
        double scale = 0.0;
        for (Eigen::Index i = 0; i < nb; ++i) scale = std::max(scale, fbb(i, i));
        const Eigen::VectorXd sv = sym_singular_values(efim);
        dims.push_back(scale > 0.0 ? count_above(sv, std::max(rel_tol * sv[0], kRoundoffFloor * scale)) : 0);
    }
    return dims;
}

int IdentReport::dim(Block b) const
{
    for (const auto& x : blocks)
        if (x.block == b) return x.identifiable_dim;
    return 0;
}

double IdentReport::position_crb() const
{
    return crb_diag.size() >= 3 ? std::sqrt(crb_diag.head<3>().sum()) : 0.0;
}

IdentReport ident_report(const Fim& f)
{
    IdentReport r;
    r.masked_dim = f.mask.dim();
    const auto dims = block_dims(f.matrix, f.blocks);
    for (std::size_t i = 0; i < f.blocks.size(); ++i) r.blocks.push_back({f.blocks[i].block, f.blocks[i].size, dims[i]});
    r.total_rank = scaled_rank(f.matrix);
    r.verdict = r.total_rank == r.masked_dim ? Verdict::Identifiable : Verdict::NonIdentifiable;
    r.chart_singularity = f.mask.orientation && std::abs(f.state.orientation.beta) > kPi / 2 - 0.1;

    if (f.matrix.rows() > 0) {
        const Eigen::VectorXd d = jacobi_scale(f.matrix);
        const Eigen::MatrixXd fs = d.cwiseInverse().asDiagonal() * f.matrix * d.cwiseInverse().asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fs);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double threshold = kRankTolerance * ev.cwiseAbs().maxCoeff();
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev[i] > threshold) inv[i] = 1.0 / ev[i];
        const Eigen::MatrixXd pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
        r.crb_diag = pinv.diagonal().cwiseQuotient(d.cwiseProduct(d));
        r.singular_values = sym_singular_values(fs);
    }
    return r;
}

IdentReport with_candidates(IdentReport r, std::size_t n_candidates)
{
    if (r.verdict == Verdict::Identifiable && n_candidates > 1) r.verdict = Verdict::Ambiguous;
    return r;
}

void write_report_csv(std::ostream& os, const IdentReport& r)
{
    os << "block,size,identifiable_dim,crb_diag\n";
    std::size_t off = 0;
    char buf[64];
    for (const auto& b : r.blocks) {
        os << to_string(b.block) << ',' << b.size << ',' << b.identifiable_dim << ',';
        for (int k = 0; k < b.size; ++k) {
            std::snprintf(buf, sizeof buf, "%.9g", r.crb_diag.size() ? r.crb_diag[static_cast<Eigen::Index>(off + k)] : 0.0);
            os << (k ? ";" : "") << buf;
        }
        os << '\n';
        off += static_cast<std::size_t>(b.size);
    }
    os << "total," << r.masked_dim << ',' << r.total_rank << ',' << to_string(r.verdict) << '\n';
}

// ---------------------------------------------------------------------------

const std::vector<Table1Row>& table1()
{
    static const std::vector<Table1Row> rows = {
        {1, "SISO", "0 RISs, 4 BSs", "WB", "TDoA", 3, 1, 3, 0, "with 3 BSs and RTT measurements"},
        {2, "SISO", "1 RIS, 1 BS", "WB", "TDoA, AoD", 3, 1, 2, 0, "in near-field w/o LOS to BS"},
        {3, "SISO", "2 RISs, 1 BS", "NB", "AoD", 3, 0, 3, 0, "w/o LOS to BS"},
        {4, "SISO", "1 RIS, 0 BSs", "WB", "RTT, AoD", 3, 0, 1, 0, "N/A"},
        {5, "MISO", "0 RISs, 2 BSs", "NB", "AoD", 3, 0, 2, 0, "N/A"},
        {6, "MISO", "1 RIS, 1 BS", "NB", "AoD", 3, 0, 2, 0, "in near-field w/o LOS to BS"},
        {7, "SIMO", "0 RISs, 3 BSs", "NB", "AoA", 3, 0, 3, 3, "N/A"},
        {8, "SIMO", "1 RIS, 1 BS", "NB", "AoD, AoA", 3, 0, 2, 3, "N/A"},
        {9, "MIMO", "0 RISs, 2 BSs", "NB", "AoD, AoA", 3, 0, 2, 3, "N/A"},
        {10, "MIMO", "1 RIS, 1 BS", "NB", "AoD, AoA", 3, 0, 2, 3, "in near-field w/o LOS to BS"},
    };
    return rows;
}

std::string describe_state(int position, int clock, int velocity, int orientation)
{
    std::vector<std::string> parts;
    if (position) parts.push_back(std::to_string(position) + "D pos");
    if (clock) parts.push_back("clock");
    if (velocity) parts.push_back(std::to_string(velocity) + "D vel");
    if (orientation) parts.push_back(std::to_string(orientation) + "D ori");
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out.empty() ? "none" : out;
}

std::vector<TableComparison> reproduce_table(const std::vector<ScenarioFile>& gallery, const NoiseSigmas& sigmas)
{
    std::vector<TableComparison> out;
    for (const auto& file : gallery) {
        const Scenario& s = file.scenario;
        if (!file.ue) throw Error("gallery scenario '" + s.name + "' has no UE state");
        TableComparison c;
        c.name = s.name;
        c.row = s.table_row;
        c.report = ident_report(fim(s, *file.ue, sigmas));
        c.position = c.report.dim(Block::Position);
        c.clock = c.report.dim(Block::Clock);
        c.velocity = c.report.dim(Block::Velocity);
        c.orientation = c.report.dim(Block::Orientation);
        if (c.row >= 1 && c.row <= static_cast<int>(table1().size())) {
            const auto& t = table1()[static_cast<std::size_t>(c.row - 1)];
            c.match = t.position == c.position && t.clock == c.clock && t.velocity == c.velocity &&
                      t.orientation == c.orientation;
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::string format_table(const std::vector<TableComparison>& rows)
{
    std::ostringstream os;
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                    const std::string& e, const std::string& f, const std::string& g) {
        os << std::left << std::setw(5) << a << std::setw(16) << b << std::setw(6) << c << std::setw(11) << d
           << std::setw(30) << e << std::setw(30) << f << g << '\n';
    };
    line("", "Scenario", "Sig.", "Meas.", "Identifiable State (table)", "Identifiable State (FIM)", "Match");
    int matches = 0;
    for (const auto& r : rows) {
        const bool known = r.row >= 1 && r.row <= static_cast<int>(table1().size());
        const std::string computed = describe_state(r.position, r.clock, r.velocity, r.orientation);
        if (!known) {
            line("?", r.name, "", "", "", computed, "no");
            continue;
        }
        const auto& t = table1()[static_cast<std::size_t>(r.row - 1)];
        line(t.link, t.scenario, t.signalling, t.measurements,
             describe_state(t.position, t.clock, t.velocity, t.orientation), computed, r.match ? "yes" : "NO");
        matches += r.match;
    }
    os << matches << "/" << rows.size() << " rows match\n";
    return os.str();
}

void write_table_csv(std::ostream& os, const std::vector<TableComparison>& rows)
{
    os << "row,name,pos,clock,vel,ori,expected,computed,match\n";
    for (const auto& r : rows) {
        std::string expected;
        if (r.row >= 1 && r.row <= static_cast<int>(table1().size())) {
            const auto& t = table1()[static_cast<std::size_t>(r.row - 1)];
            expected = describe_state(t.position, t.clock, t.velocity, t.orientation);
        }
        os << r.row << ',' << r.name << ',' << r.position << ',' << r.clock << ',' << r.velocity << ','
           << r.orientation << ",\"" << expected << "\",\""
           << describe_state(r.position, r.clock, r.velocity, r.orientation) << "\"," << (r.match ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------

std::vector<PhaseProfile> random_profiles(const RisNode& ris, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);
    std::vector<PhaseProfile> out;
    for (int k = 0; k < n; ++k) {
        PhaseProfile p(static_cast<Eigen::Index>(ris.num_elements()));
        for (auto& v : p) v = uni(rng);
        out.push_back(wrap_profile(p));
    }
    return out;
}

Eigen::MatrixXd nearfield_jacobian(const Vec3& source, const RisNode& ris, const Vec3& ue,
                                   const std::vector<PhaseProfile>& profiles, double lambda, double sigma)
{
    const double k = kTwoPi / lambda;
    const auto elements = ris_element_positions(ris);
    const auto n = static_cast<Eigen::Index>(profiles.size());
    Eigen::MatrixXcd j(n, 5);
    for (Eigen::Index p = 0; p < n; ++p) {
        const PhaseProfile& prof = profiles[static_cast<std::size_t>(p)];
        if (static_cast<std::size_t>(prof.size()) != elements.size()) throw Error("phase profile size mismatch");
        cdouble a = 0.0;
        Eigen::Vector3cd da = Eigen::Vector3cd::Zero();
        for (std::size_t e = 0; e < elements.size(); ++e) {
            const double d1 = (source - elements[e]).norm();
            const Vec3 diff = ue - elements[e];
            const double d2 = diff.norm();
            if (!(d1 > 0.0) || !(d2 > 0.0)) throw DegenerateDirection("point coincides with RIS element");
            const cdouble term = std::polar(1.0 / (d1 * d2), -k * (d1 + d2) + prof[static_cast<Eigen::Index>(e)]);
            a += term;
            da += (term * cdouble(-1.0 / d2, -k)) * (diff / d2).cast<cdouble>();  // d(term)/d(d2) * d(d2)/dp
        }
        j.block<1, 3>(p, 0) = da.transpose();
        j(p, 3) = a;
        j(p, 4) = cdouble(0.0, 1.0) * a;
    }
    Eigen::MatrixXd out(2 * n, 5);
    out.topRows(n) = j.real();
    out.bottomRows(n) = j.imag();
    return (std::sqrt(2.0) / sigma) * out;
}

Eigen::MatrixXd nearfield_fim(const Vec3& source, const RisNode& ris, const Vec3& ue,
                              const std::vector<PhaseProfile>& profiles, double lambda, double sigma)
{
    const Eigen::MatrixXd j = nearfield_jacobian(source, ris, ue, profiles, lambda, sigma);
    return j.transpose() * j;
}

NearFieldRank nearfield_position_rank(const Eigen::MatrixXd& jacobian)
{
    // Column scaling is the Jacobi scaling of the FIM. The gain columns are
    // projected out of the position columns in the Jacobian domain, which keeps
    // far-field curvature information above roundoff.
    Eigen::MatrixXd js = jacobian;
    for (Eigen::Index c = 0; c < js.cols(); ++c) {
        const double n = js.col(c).norm();
        if (n > 0.0) js.col(c) /= n;
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(js.rightCols<2>());
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(js.rows(), 2);
    const Eigen::MatrixXd p = js.leftCols<3>() - q * (q.transpose() * js.leftCols<3>());
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
    const Eigen::VectorXd ev = svd.singularValues().cwiseAbs2();

    NearFieldRank r;
    r.eigen_ratio = ev[0] > 0.0 ? ev[2] / ev[0] : 0.0;
    r.position_rank = count_above(ev, std::max(kRankTolerance * ev[0], kRoundoffFloor));
    return r;
}

NearFieldSweep nearfield_ident_sweep(const Scenario& s, std::size_t ris, const Vec3& direction,
                                     const std::vector<double>& ranges, const NearFieldOptions& opt)
{
    if (ris >= s.riss.size()) throw Error("no RIS with index " + std::to_string(ris));
    if (s.bss.empty()) throw Infeasible("near-field model needs a BS to illuminate the RIS");
    const RisNode& r = s.riss[ris];
    const Vec3 dir = direction.normalized();
    const auto profiles = random_profiles(r, opt.n_profiles, opt.seed);

    NearFieldSweep out;
    out.fraunhofer = fraunhofer_distance(r, s.lambda());
    for (double range : ranges) {
        const Vec3 ue = r.center + range * dir;
        const auto rank = nearfield_position_rank(
            nearfield_jacobian(s.bss.front().position, r, ue, profiles, s.lambda(), opt.noise_sigma));
        NearFieldPoint pt;
        pt.range = range;
        pt.position_rank = rank.position_rank;
        pt.eigen_ratio = rank.eigen_ratio;
        out.points.push_back(pt);
        if (!out.transition_range && pt.position_rank < 3) out.transition_range = range;
    }
    return out;
}

}  // namespace risloc
