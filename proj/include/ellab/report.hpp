#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellab/certifier.hpp"
#include "ellab/fdsolver.hpp"
#include "ellab/geometry.hpp"
#include "ellab/grid.hpp"
#include "ellab/modulus.hpp"
#include "ellab/probes.hpp"

namespace ellab {

using Json = nlohmann::ordered_json;

inline Json to_json(const Vec2& v) { return Json{{"x", v.x}, {"y", v.y}}; }

inline Json to_json(const DiniVerdict& v) {
    Json j;
    j["is_dini"] = v.is_dini;
    j["integral_estimate"] = v.integral_estimate;
    j["cutoff_used"] = v.cutoff_used;
    j["log_cutoff"] = v.log_cutoff;
    if (!v.is_dini) {
        j["witness"] = {{"eps_hi", v.witness_eps_hi},
                        {"eps_lo", v.witness_eps_lo},
                        {"growth", v.witness_growth}};
    }
    return j;
}

inline Json to_json(const HyperplaneFrame& f) {
    Json j;
    j["scale"] = f.scale;
    j["normal"] = to_json(f.normal);
    j["slack"] = f.slack;
    return j;
}

inline Json to_json(const ReifenbergCertificate& c) {
    Json j;
    j["side"] = to_string(c.side);
    j["eta_geo"] = c.eta_geo;
    j["domain"] = c.domain_name;
    j["modulus"] = c.modulus_name;
    j["pass"] = c.pass;
    j["fitted_K"] = std::isfinite(c.fitted_K) ? Json(c.fitted_K) : Json("infinite");
    Json scales = Json::array();
    for (std::size_t k = 0; k < c.frames.size(); ++k) {
        Json row;
        row["k"] = k;
        row["scale"] = c.frames[k].scale;
        row["normal"] = to_json(c.frames[k].normal);
        row["slack"] = c.frames[k].slack;
        row["omega"] = c.omega_values[k];
        row["pass"] = static_cast<bool>(c.scale_pass[k]);
        if (k < c.drifts.size()) row["drift_to_next"] = c.drifts[k];
        scales.push_back(row);
    }
    j["scales"] = scales;
    return j;
}

inline Json to_json(const LimitNormal& n) {
    Json j;
    j["normal"] = to_json(n.normal);
    Json tail = Json::array();
    for (const auto& e : n.cauchy_tail)
        tail.push_back({{"k", e.k},
                        {"sup_difference", e.sup_difference},
                        {"bound", e.bound},
                        {"within_bound", e.within_bound}});
    j["cauchy_tail"] = tail;
    return j;
}

inline Json to_json(const SolveReport& r) {
    Json j;
    j["converged"] = r.converged;
    j["sweeps"] = r.sweeps;
    j["final_residual"] = r.final_residual;
    j["omega_used"] = r.omega_used;
    return j;
}

inline Json to_json(const LipschitzTable& t) {
    Json j;
    Json rows = Json::array();
    for (const auto& [r, q] : t.rows) rows.push_back({{"r", r}, {"q", q}});
    j["rows"] = rows;
    j["lipschitz_constant"] = t.lipschitz_constant;
    return j;
}

inline Json to_json(const C1AlphaFit& f) {
    Json j;
    j["a"] = f.a;
    j["alpha_hat"] = f.alpha_hat;
    j["C_hat"] = f.C_hat;
    j["machine_residuals"] = f.machine_residuals;
    Json rows = Json::array();
    for (const auto& [r, s] : f.residuals) rows.push_back({{"r", r}, {"sup_residual", s}});
    j["residuals"] = rows;
    return j;
}

inline Json to_json(const HopfTable& t) {
    Json j;
    j["anchor_value"] = t.anchor_value;
    j["c_min"] = t.c_min;
    Json rows = Json::array();
    for (const auto& [tt, ratio] : t.rows) rows.push_back({{"t", tt}, {"ratio", ratio}});
    j["rows"] = rows;
    return j;
}

inline Json to_json(const ConstraintSlack& s) {
    return Json{{"name", s.name}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"slack", s.slack},
                {"ok", s.ok}};
}

inline Json to_json(const ProofConstants& pc) {
    Json j;
    j["kind"] = pc.kind == ProofKind::Lipschitz ? "lipschitz" : "hopf";
    j["alpha0"] = pc.alpha0;
    j["eta"] = pc.eta;
    j["c0"] = pc.c0;
    j["Cbar"] = pc.Cbar;
    j["Chat"] = pc.Chat;
    j["K_eta"] = pc.K_eta;
    if (pc.kind == ProofKind::Hopf) {
        j["a_tilde"] = pc.a_tilde;
        j["c2"] = pc.c2;
        j["delta1"] = pc.delta1;
        if (pc.c_tilde > 0.0) j["c_tilde"] = pc.c_tilde;
    }
    j["feasible"] = pc.feasible;
    Json sl = Json::array();
    for (const auto& s : pc.slacks) sl.push_back(to_json(s));
    j["constraints"] = sl;
    return j;
}

inline Json to_json(const ScaleSequence& s) {
    Json j;
    j["eta"] = s.eta;
    j["alpha0"] = s.alpha0;
    j["c0"] = s.c0;
    j["normalized"] = s.normalized;
    j["rescale_r1"] = s.rescale_r1;
    j["proviso_holds"] = s.proviso_holds;
    j["sum_bound"] = s.sum_bound;
    j["sum_within_bound"] = s.sum_within_bound;
    j["sum_status"] = s.proviso_holds ? (s.sum_within_bound ? "bounded" : "exceeded")
                                      : "not-applicable";
    j["A"] = s.A;
    if (!s.a.empty()) j["a"] = s.a;
    j["partial_sums"] = s.partial_sums;
    return j;
}

inline Json to_json(const InductionReport& r) {
    Json j;
    j["kind"] = r.kind == ProofKind::Lipschitz ? "lipschitz" : "hopf";
    j["M"] = r.M;
    j["all_checked_pass"] = r.all_checked_pass;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json e;
        e["k"] = row.k;
        e["r"] = row.r;
        e["A_k"] = row.A_k;
        if (row.skipped) {
            e["skipped"] = row.note;
        } else {
            e["a_k"] = row.a_k;
            e["lhs"] = row.lhs;
            e["rhs"] = row.rhs;
            e["slack"] = row.slack;
        }
        rows.push_back(e);
    }
    j["scales"] = rows;
    return j;
}

// ---------------------------------------------------------------------------
// Grid CSV: "x,y,value" rows over inside + band nodes, with a JSON sidecar
// ---------------------------------------------------------------------------

inline void write_grid_csv(const std::string& path, const GridDomain& dom,
                           const GridFunction& u) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "x,y,value\n";
    out.precision(17);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (dom.state[dom.idx(i, j)] != NodeState::Outside) {
                const Vec2 p = dom.pos(i, j);
                out << p.x << ',' << p.y << ',' << u.at(i, j) << '\n';
            }
}

inline GridFunction read_grid_csv(const std::string& path, const GridDomain& dom) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    GridFunction u(dom.nx, dom.ny);
    std::string line;
    std::getline(in, line);  // header
    std::size_t filled = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, y, v;
        if (!(row >> x >> y >> v)) throw Error("bad grid CSV row: " + line);
        const int i = static_cast<int>(std::lround((x - dom.x0) / dom.h));
        const int j = static_cast<int>(std::lround((y - dom.y0) / dom.h));
        if (!dom.in_range(i, j)) throw GeometryError("grid CSV point off the domain grid");
        u.at(i, j) = v;
        ++filled;
    }
    std::size_t expect = 0;
    for (auto s : dom.state)
        if (s != NodeState::Outside) ++expect;
    if (filled != expect)
        throw GeometryError("grid CSV does not match the domain (node count mismatch)");
    return u;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace ellab
