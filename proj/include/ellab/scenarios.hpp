#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ellab/certifier.hpp"
#include "ellab/fdsolver.hpp"
#include "ellab/geometry.hpp"
#include "ellab/grid.hpp"
#include "ellab/modulus.hpp"
#include "ellab/probes.hpp"
#include "ellab/report.hpp"

namespace ellab {

// Exit-code contract: 0 = pass, 2 = scientific check failed; operational
// errors throw and the CLI maps them to 1.
struct ScenarioResult {
    Json summary;
    int exit_code = 0;
    std::string verdict;
};

// ---------------------------------------------------------------------------
// Named objects
// ---------------------------------------------------------------------------

struct ModulusSpec {
    std::string family = "power";  // power | inv-log | inv-log-sq | table
    double alpha = 1.0;
    double radius = 0.0;  // 0 = family default
    double scale = 1.0;
    std::string table_path;

    Modulus build() const {
        Modulus m = [&] {
            if (family == "power") return Modulus::power(alpha, radius > 0 ? radius : 1.0);
            if (family == "inv-log" || family == "inv_log")
                return Modulus::inv_log(radius > 0 ? radius : 0.5);
            if (family == "inv-log-sq" || family == "inv_log_sq")
                return Modulus::inv_log_sq(radius > 0 ? radius : 0.5);
            if (family == "table") return Modulus::from_csv(table_path);
            throw DomainError("unknown modulus family: " + family);
        }();
        return scale == 1.0 ? m : Modulus::scaled(std::move(m), scale);
    }
};

struct DomainSpec {
    std::string name = "log-example";  // flat | tilted | log-example | power-cusp | csv
    double slope = 1.0;
    double cusp_alpha = 0.5;
    double radius = 1.0;
    double rotate_by = 0.0;
    std::string csv_path;

    GraphDomain2D build() const {
        GraphDomain2D d = [&] {
            if (name == "flat") return GraphDomain2D::flat(radius);
            if (name == "tilted") return GraphDomain2D::tilted(slope, radius);
            if (name == "log-example" || name == "log_example")
                return GraphDomain2D::log_example();
            if (name == "power-cusp" || name == "power_cusp")
                return GraphDomain2D::power_cusp(cusp_alpha, radius);
            if (name == "csv") return GraphDomain2D::from_csv(csv_path);
            throw DomainError("unknown domain: " + name);
        }();
        if (rotate_by != 0.0) d = d.rotated(rotate_by);
        d.validate();
        return d;
    }
};

struct ShapeSpec {
    std::string kind = "half_disc";  // half_disc | half_cube | graph
    double r = 1.0;
    DomainSpec domain;  // for graph

    Shape build() const {
        if (kind == "half_disc") return Shape::half_disc(r);
        if (kind == "half_cube") return Shape::half_cube(r);
        if (kind == "graph") {
            GraphDomain2D d = domain.build();
            return Shape::graph(d, std::min(r, d.radius));
        }
        throw DomainError("unknown shape: " + kind);
    }

    Json to_json() const {
        Json j;
        j["kind"] = kind;
        j["r"] = r;
        if (kind == "graph") j["domain"] = domain.name;
        return j;
    }
};

inline BoundaryData bc_by_name(const std::string& name, const Shape& shape) {
    if (name == "zero") return BoundaryData::zero();
    if (name == "linear-y") return BoundaryData::linear_y();
    if (name == "flat0-arc1" || name == "flat0-outer1") return BoundaryData::flat0_outer1(shape);
    if (name == "bottom0-top1-sides0" || name == "box-top1") return BoundaryData::box_top1(shape);
    throw DomainError("unknown boundary data: " + name);
}

inline OpMode mode_by_name(const std::string& name) {
    if (name == "sup") return OpMode::Sup;
    if (name == "inf") return OpMode::Inf;
    if (name == "laplace") return OpMode::Laplace;
    throw DomainError("unknown operator mode: " + name);
}

inline Side side_by_name(const std::string& name) {
    if (name == "ext" || name == "exterior") return Side::Exterior;
    if (name == "int" || name == "interior") return Side::Interior;
    throw DomainError("unknown side: " + name);
}

// ---------------------------------------------------------------------------
// Output directory helper
// ---------------------------------------------------------------------------

struct OutputDir {
    std::filesystem::path root;
    bool enabled = false;

    explicit OutputDir(const std::string& dir) {
        if (!dir.empty()) {
            root = dir;
            std::filesystem::create_directories(root);
            enabled = true;
        }
    }

    std::string path(const std::string& file) const { return (root / file).string(); }

    void write_json(const std::string& file, const Json& j) const {
        if (enabled) write_text(path(file), j.dump(2) + "\n");
    }
    void write(const std::string& file, const std::string& content) const {
        if (enabled) write_text(path(file), content);
    }
};

// ---------------------------------------------------------------------------
// dini-check
// ---------------------------------------------------------------------------

inline ScenarioResult scenario_dini_check(const ModulusSpec& spec, double r0, double tol,
                                          const OutputDir& out) {
    const Modulus m = spec.build();
    const double r = r0 > 0 ? r0 : m.radius();
    const DiniVerdict v = dini_integral(m, r, tol);
    ScenarioResult res;
    res.summary["scenario"] = "dini-check";
    res.summary["modulus"] = m.describe();
    res.summary["r0"] = r;
    res.summary["tol"] = tol;
    res.summary["verdict"] = to_json(v);
    res.exit_code = 0;  // a clean classification is a successful check either way
    res.verdict = v.is_dini ? "Dini" : "NOT Dini";
    out.write_json("summary.json", res.summary);
    return res;
}

// ---------------------------------------------------------------------------
// reifenberg-verify
// ---------------------------------------------------------------------------

inline ScenarioResult scenario_reifenberg_verify(const DomainSpec& dspec,
                                                 const ModulusSpec& mspec, Side side, double eta,
                                                 int k_max, const OutputDir& out,
                                                 bool theta_sweep = false) {
    const GraphDomain2D dom = dspec.build();
    const Modulus m = mspec.build();
    const auto cert = check_reifenberg(dom, m, side, eta, k_max);
    ScenarioResult res;
    res.summary["scenario"] = "reifenberg-verify";
    res.summary["certificate"] = to_json(cert);
    if (cert.pass) res.summary["limit_normal"] = to_json(limit_normal(cert));
    if (theta_sweep) {
        Json sweep = Json::array();
        for (const auto& [theta, K] :
             k_theta_sweep(dom, m, side, {0.25, 0.5, 0.75}, std::min(k_max, 8)))
            sweep.push_back({{"theta", theta}, {"K", K}});
        res.summary["K_theta_sweep"] = sweep;
    }
    res.exit_code = cert.pass ? 0 : 2;
    res.verdict = cert.pass ? "certificate PASS" : "certificate FAIL";
    out.write_json("summary.json", res.summary);
    return res;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveScenarioResult {
    ScenarioResult result;
    GridDomain dom;
    GridFunction u;
    SolveReport report;
};

inline SolveScenarioResult scenario_solve(const ShapeSpec& sspec, const std::string& mode_name,
                                          double lambda, double Lambda, const std::string& bc,
                                          double h, double tol, const std::string& out_csv,
                                          const OutputDir& out) {
    const Shape shape = sspec.build();
    const OpMode mode = mode_by_name(mode_name);
    const Ellipticity e{lambda, Lambda};
    const GridDomain dom = build_domain(shape, h);
    const BoundaryData g = bc_by_name(bc, shape);
    SolveOptions opts;
    opts.tol = tol;
    auto [u, rep] = solve(dom, mode, e, nullptr, g, opts);

    SolveScenarioResult sres{.result = {}, .dom = dom, .u = std::move(u), .report = rep};
    Json meta;
    meta["shape"] = sspec.to_json();
    meta["h"] = h;
    meta["mode"] = mode_name;
    meta["lambda"] = lambda;
    meta["Lambda"] = Lambda;
    meta["bc"] = bc;
    meta["bbox"] = {{"x0", dom.x0}, {"y0", dom.y0}, {"nx", dom.nx}, {"ny", dom.ny}};
    meta["solve"] = to_json(rep);

    if (!out_csv.empty()) {
        write_grid_csv(out_csv, sres.dom, sres.u);
        write_text(out_csv + ".meta.json", meta.dump(2) + "\n");
    }
    sres.result.summary["scenario"] = "solve";
    sres.result.summary["meta"] = meta;
    sres.result.exit_code = rep.converged ? 0 : 2;
    sres.result.verdict = rep.converged ? "solve converged" : "solve did not converge";
    out.write_json("summary.json", sres.result.summary);
    return sres;
}

/// Rebuild the domain and solution written by scenario_solve.
inline std::pair<GridDomain, GridFunction> load_solution(const std::string& csv_path) {
    std::ifstream meta_in(csv_path + ".meta.json");
    if (!meta_in) throw Error("missing sidecar " + csv_path + ".meta.json");
    Json meta = Json::parse(meta_in);
    ShapeSpec sspec;
    sspec.kind = meta["shape"]["kind"].get<std::string>();
    sspec.r = meta["shape"]["r"].get<double>();
    if (sspec.kind == "graph") sspec.domain.name = meta["shape"]["domain"].get<std::string>();
    const GridDomain dom = build_domain(sspec.build(), meta["h"].get<double>());
    GridFunction u = read_grid_csv(csv_path, dom);
    return {dom, u};
}

// ---------------------------------------------------------------------------
// probes
// ---------------------------------------------------------------------------

inline std::vector<double> default_scales(const GridDomain& dom) {
    std::vector<double> scales;
    const double top = dom.nominal_radius / 2.0;
    for (double r = top; r >= 3.0 * dom.h - 1e-12; r /= 2.0) scales.push_back(r);
    std::sort(scales.begin(), scales.end());
    if (scales.size() < 2) throw ResolutionError("grid too coarse for probe scales");
    return scales;
}

inline ScenarioResult scenario_probe_lipschitz(const GridDomain& dom, const GridFunction& u,
                                               std::vector<double> scales,
                                               const OutputDir& out) {
    if (scales.empty()) scales = default_scales(dom);
    const auto table = lipschitz_probe(u, dom, scales);
    ScenarioResult res;
    res.summary["scenario"] = "probe-lipschitz";
    res.summary["table"] = to_json(table);
    std::ostringstream csv;
    csv << "r,q\n";
    for (const auto& [r, q] : table.rows) csv << r << ',' << q << '\n';
    out.write("lipschitz.csv", csv.str());
    res.exit_code = 0;
    std::ostringstream v;
    v << "lipschitz constant " << table.lipschitz_constant;
    res.verdict = v.str();
    out.write_json("summary.json", res.summary);
    return res;
}

inline ScenarioResult scenario_probe_c1alpha(const GridDomain& dom, const GridFunction& u,
                                             std::vector<double> scales, const OutputDir& out) {
    if (scales.empty()) scales = default_scales(dom);
    const auto fit = c1alpha_fit(u, dom, scales);
    ScenarioResult res;
    res.summary["scenario"] = "probe-c1alpha";
    res.summary["fit"] = to_json(fit);
    res.exit_code = 0;
    std::ostringstream v;
    v << "a " << fit.a << ", alpha_hat " << fit.alpha_hat;
    res.verdict = v.str();
    out.write_json("summary.json", res.summary);
    return res;
}

inline ScenarioResult scenario_probe_hopf(const GridDomain& dom, const GridFunction& u, Vec2 l,
                                          double t_lo, double t_hi, const OutputDir& out) {
    const auto table = hopf_probe(u, dom, l.normalized(), t_lo, t_hi);
    ScenarioResult res;
    res.summary["scenario"] = "probe-hopf";
    res.summary["direction"] = to_json(l.normalized());
    res.summary["table"] = to_json(table);
    std::ostringstream csv;
    csv << "t,ratio\n";
    for (const auto& [t, ratio] : table.rows) csv << t << ',' << ratio << '\n';
    out.write("hopf.csv", csv.str());
    res.exit_code = table.c_min > 0.0 ? 0 : 2;
    std::ostringstream v;
    v << "c_min " << table.c_min;
    res.verdict = v.str();
    out.write_json("summary.json", res.summary);
    return res;
}

inline ScenarioResult scenario_probe_fmod(const GridDomain& dom, const GridFunction& f,
                                          std::vector<double> scales, double tol,
                                          const OutputDir& out) {
    if (scales.empty()) scales = default_scales(dom);
    const Modulus omega_f = f_modulus(f, dom, scales);
    ScenarioResult res;
    res.summary["scenario"] = "probe-fmod";
    Json knots = Json::array();
    for (const auto& [r, w] : omega_f.knots()) knots.push_back({{"r", r}, {"omega", w}});
    res.summary["omega_f"] = knots;
    const bool zero = omega_f.eval(omega_f.radius()) == 0.0;
    if (!zero) res.summary["dini"] = to_json(dini_integral(omega_f, omega_f.radius(), tol));
    res.exit_code = 0;
    res.verdict = zero ? "omega_f = 0" : "omega_f tabulated";
    out.write_json("summary.json", res.summary);
    return res;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

inline ScenarioResult scenario_certify_lipschitz(const ProofInputs& in, int k_max,
                                                 const OutputDir& out) {
    const ProofConstants pc = select_constants_lipschitz(in);
    const ScaleSequence seq = scale_sequence(in.omega, pc.eta, pc.alpha0, pc.c0, k_max);
    ScenarioResult res;
    res.summary["scenario"] = "certify-lipschitz";
    res.summary["constants"] = to_json(pc);
    res.summary["scale_sequence"] = to_json(seq);
    res.exit_code = pc.feasible ? 0 : 2;
    res.verdict = pc.feasible ? "constants feasible" : "constants infeasible";
    out.write_json("summary.json", res.summary);
    return res;
}

inline ScenarioResult scenario_certify_hopf(const ProofInputs& in, double delta1, double c2,
                                            int k_max, const OutputDir& out) {
    const ProofConstants pc = select_constants_hopf(in, delta1, c2);
    const ScaleSequence seq = scale_sequence(in.omega, pc.eta, pc.alpha0, pc.c0, k_max);
    ScenarioResult res;
    res.summary["scenario"] = "certify-hopf";
    res.summary["constants"] = to_json(pc);
    res.summary["scale_sequence"] = to_json(seq);
    res.exit_code = pc.feasible ? 0 : 2;
    res.verdict = pc.feasible ? "constants feasible" : "constants infeasible";
    out.write_json("summary.json", res.summary);
    return res;
}

// ---------------------------------------------------------------------------
// Auxiliary per-scale flat solves for the induction check (optional, costly)
// ---------------------------------------------------------------------------

inline Json induction_aux_solves(const ReifenbergCertificate& cert, const ProofConstants& pc,
                                 const ScaleSequence& seq, double M, int k_lo, int k_hi) {
    Json rows = Json::array();
    for (int k = k_lo; k <= std::min<int>(k_hi, static_cast<int>(cert.frames.size()) - 1); ++k) {
        const double r = cert.frames[k].scale;
        const Vec2 n = cert.frames[k].normal;
        const double shift = pc.K_eta * r * std::min(cert.omega_values[k], pc.c0);
        const Shape shape = Shape::shifted_half_disc(r, n, shift);
        const GridDomain dom = build_domain(shape, r / 48.0);
        const double top = pc.Chat * M * r * seq.A[std::min<std::size_t>(k, seq.A.size() - 1)];
        auto bdata = BoundaryData::on_boundary(
            [shape, top](Vec2 b) { return shape.on_outer_boundary(b) ? top : 0.0; }, "aux");
        SolveOptions opts;
        opts.tol = std::max(1e-10, 1e-8 * top);
        auto [v, rep] = solve(dom, OpMode::Sup, Ellipticity{1.0, 2.0}, nullptr, bdata, opts);
        // slope of v along n near the origin
        double syy = 0.0, syv = 0.0;
        for (auto [i, j] : dom.inside_nodes) {
            const Vec2 p = dom.pos(i, j);
            if (p.norm() > 0.5 * r) continue;
            const double s = p.dot(n);
            if (s <= 0.0) continue;
            syy += s * s;
            syv += s * v.at(i, j);
        }
        const double slope = syy > 0 ? syv / syy : 0.0;
        Json row;
        row["k"] = k;
        row["r"] = r;
        row["boundary_top"] = top;
        row["slope_along_normal"] = slope;
        row["sweeps"] = rep.sweeps;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// demo-log-domain: the end-to-end showcase chain
// ---------------------------------------------------------------------------

inline ScenarioResult scenario_demo_log_domain(double h, const OutputDir& out,
                                               bool with_aux_solves = false) {
    ScenarioResult res;
    res.summary["scenario"] = "demo-log-domain";
    res.summary["h"] = h;
    bool pass = true;

    // 1. geometry certificate on the log-profile domain
    const GraphDomain2D dom2d = GraphDomain2D::log_example();
    const Modulus m = Modulus::inv_log_sq();
    const auto cert = check_reifenberg(dom2d, m, Side::Exterior, 0.5, 12);
    res.summary["geometry"] = to_json(cert);
    if (cert.pass) res.summary["limit_normal"] = to_json(limit_normal(cert));
    pass = pass && cert.pass;

    // 2. harmonic and extremal-operator solves with 0 on the graph, 1 on the arc
    const Shape shape = Shape::graph(dom2d, dom2d.radius);
    const GridDomain dom = build_domain(shape, h);
    const BoundaryData g = BoundaryData::flat0_outer1(shape);
    SolveOptions opts;
    opts.tol = 1e-8;
    auto [u_h, rep_h] = solve(dom, OpMode::Laplace, Ellipticity{1.0, 1.0}, nullptr, g, opts);
    auto [u_p, rep_p] = solve(dom, OpMode::Sup, Ellipticity{1.0, 2.0}, nullptr, g, opts);
    res.summary["solve_harmonic"] = to_json(rep_h);
    res.summary["solve_pucci_sup"] = to_json(rep_p);
    pass = pass && rep_h.converged && rep_p.converged;
    if (out.enabled) {
        write_grid_csv(out.path("harmonic.csv"), dom, u_h);
        write_grid_csv(out.path("pucci_sup.csv"), dom, u_p);
    }

    // 3. regularity probes on the harmonic field
    std::vector<double> scales;
    for (double r = 0.25; r >= std::max(3.0 * h, 1.0 / 256.0) - 1e-12; r /= 2.0)
        scales.push_back(r);
    std::sort(scales.begin(), scales.end());
    const auto lip = lipschitz_probe(u_h, dom, scales);
    res.summary["lipschitz"] = to_json(lip);
    std::vector<double> qs;
    for (const auto& [r, q] : lip.rows) qs.push_back(q);
    std::sort(qs.begin(), qs.end());
    const double q_median = qs[qs.size() / 2];
    const bool lip_bounded = lip.lipschitz_constant <= 1.5 * q_median;
    res.summary["lipschitz_bounded"] = lip_bounded;
    pass = pass && lip_bounded;

    const double t_lo = std::max(4.0 * h, 1.0 / 512.0), t_hi = 0.125;
    const auto hopf_e2 = hopf_probe(u_h, dom, Vec2{0.0, 1.0}, t_lo, t_hi);
    const auto hopf_diag =
        hopf_probe(u_h, dom, Vec2{1.0, 1.0}.normalized(), t_lo, t_hi);
    res.summary["hopf_e2"] = to_json(hopf_e2);
    res.summary["hopf_diag"] = to_json(hopf_diag);
    pass = pass && hopf_e2.c_min > 0.0 && hopf_diag.c_min > 0.0;

    const auto lip_pucci = lipschitz_probe(u_p, dom, scales);
    res.summary["lipschitz_pucci_sup"] = to_json(lip_pucci);

    // 4. constant machinery fed by the measured geometry
    const double K_fit = std::max(1.0, cert.fitted_K);
    ProofInputs inputs = ProofInputs::with_constant_K(K_fit, m);
    const ProofConstants pc = select_constants_lipschitz(inputs);
    res.summary["constants_lipschitz"] = to_json(pc);
    pass = pass && pc.feasible;

    const ScaleSequence seq_norm = scale_sequence(m, pc.eta, pc.alpha0, pc.c0, 80);
    res.summary["scale_sequence"] = to_json(seq_norm);
    pass = pass && (!seq_norm.proviso_holds || seq_norm.sum_within_bound);

    // barrier scenario for the Hopf constants
    const Shape box = Shape::half_cube(1.0);
    const GridDomain bdom = build_domain(box, 1.0 / 64.0);
    auto [u_b, rep_b] = solve(bdom, OpMode::Inf, Ellipticity{1.0, 2.0}, nullptr,
                              BoundaryData::box_top1(box), opts);
    double c1 = kInf;
    for (auto [i, j] : bdom.inside_nodes) {
        const Vec2 p = bdom.pos(i, j);
        if (p.norm() <= 0.25) c1 = std::min(c1, u_b.at(i, j) / p.y);
    }
    res.summary["barrier_c1"] = c1;
    pass = pass && rep_b.converged && c1 > 0.0;

    const double c2 = std::min(c1, 0.49);
    const ProofConstants pch = select_constants_hopf(inputs, 0.25, c2);
    res.summary["constants_hopf"] = to_json(pch);
    pass = pass && pch.feasible;

    // 5. per-scale induction cross-check on the solved field (grid scales)
    ScaleSequence seq_grid =
        scale_sequence(m, cert.eta_geo, pc.alpha0, pc.c0, 12, /*normalize=*/false);
    double M = 0.0;
    for (auto [i, j] : dom.inside_nodes) M = std::max(M, std::abs(u_h.at(i, j)));
    const auto ind_lip = verify_induction(u_h, dom, cert, pc, seq_grid, ProofKind::Lipschitz, M);
    res.summary["induction_lipschitz"] = to_json(ind_lip);

    GridFunction u_hopf = u_h;
    const double anchor = hopf_e2.anchor_value;
    for (double& v : u_hopf.v)
        if (std::isfinite(v)) v /= anchor;
    ScaleSequence seq_grid_h =
        scale_sequence(m, cert.eta_geo, pch.alpha0, pch.c0, 12, /*normalize=*/false);
    const auto ind_hopf =
        verify_induction(u_hopf, dom, cert, pch, seq_grid_h, ProofKind::Hopf, 1.0);
    res.summary["induction_hopf"] = to_json(ind_hopf);

    if (with_aux_solves)
        res.summary["aux_solves"] = induction_aux_solves(cert, pc, seq_grid, M, 2, 6);

    res.exit_code = pass ? 0 : 2;
    res.verdict = pass ? "demo-log-domain PASS" : "demo-log-domain FAIL";
    out.write_json("summary.json", res.summary);
    return res;
}

}  // namespace ellab
