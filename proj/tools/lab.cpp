// lab: numerical laboratory for boundary regularity of fully nonlinear
// uniformly elliptic equations on rough planar domains.
//
// Subcommands mirror the library scenarios: dini check, reifenberg verify,
// solve, probe, certify, demo-log-domain.  Reports are deterministic JSON;
// run metadata (timestamps) goes to a sidecar.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellab/scenarios.hpp"

using namespace ellab;

namespace {

std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("LAB_OUT_DIR")) return env;
    return "";
}

void write_run_meta(const OutputDir& out, int exit_code) {
    if (!out.enabled) return;
    const auto now = std::chrono::system_clock::now();
    Json meta;
    meta["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    meta["exit_code"] = exit_code;
    meta["version"] = kVersion;
    out.write_json("summary.meta.json", meta);
}

int finish(ScenarioResult res, const OutputDir& out, bool print_json,
           const std::vector<std::string>& invocation) {
    res.summary["invocation"] = invocation;
    if (out.enabled) out.write_json("summary.json", res.summary);
    if (print_json)
        std::cout << res.summary.dump(2) << "\n";
    else
        std::cout << res.verdict << "\n";
    write_run_meta(out, res.exit_code);
    return res.exit_code;
}

ReifenbergCertificate cert_from_json(const Json& j) {
    ReifenbergCertificate cert;
    cert.side = side_by_name(j.at("side").get<std::string>());
    cert.eta_geo = j.at("eta_geo").get<double>();
    cert.domain_name = j.value("domain", "");
    cert.modulus_name = j.value("modulus", "");
    cert.pass = j.at("pass").get<bool>();
    if (j.at("fitted_K").is_number())
        cert.fitted_K = j.at("fitted_K").get<double>();
    else
        cert.fitted_K = kInf;
    for (const auto& row : j.at("scales")) {
        HyperplaneFrame f;
        f.scale = row.at("scale").get<double>();
        f.normal = {row.at("normal").at("x").get<double>(),
                    row.at("normal").at("y").get<double>()};
        f.slack = row.at("slack").get<double>();
        cert.frames.push_back(f);
        cert.omega_values.push_back(row.at("omega").get<double>());
        cert.scale_pass.push_back(row.at("pass").get<bool>());
        if (row.contains("drift_to_next")) cert.drifts.push_back(row.at("drift_to_next"));
    }
    return cert;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-regularity numerical laboratory"};
    app.set_config("--config", "", "INI config with per-subcommand sections");
    app.require_subcommand(1);

    std::string out_dir_flag;
    bool print_json = false;
    app.add_option("--out-dir", out_dir_flag,
                   "directory for JSON/CSV reports (env LAB_OUT_DIR)");
    app.add_flag("--json", print_json, "print the JSON summary to stdout");

    // ---- dini check -------------------------------------------------------
    auto* dini = app.add_subcommand("dini", "Dini modulus calculus");
    auto* dini_check = dini->add_subcommand("check", "classify the Dini condition");
    ModulusSpec dini_spec;
    double dini_r0 = 0.0, dini_tol = 1e-6;
    dini_check->add_option("--family", dini_spec.family, "power|inv-log|inv-log-sq|table")
        ->required();
    dini_check->add_option("--alpha", dini_spec.alpha, "power exponent");
    dini_check->add_option("--radius", dini_spec.radius, "domain radius override");
    dini_check->add_option("--scale", dini_spec.scale, "multiply the modulus by a factor");
    dini_check->add_option("--table", dini_spec.table_path, "CSV file for the table family");
    dini_check->add_option("--r0", dini_r0, "upper integration limit (default: radius)");
    dini_check->add_option("--tol", dini_tol, "refinement tolerance");

    // ---- reifenberg verify ------------------------------------------------
    auto* reif = app.add_subcommand("reifenberg", "per-scale supporting-plane geometry");
    auto* reif_verify = reif->add_subcommand("verify", "fit frames and certify the condition");
    DomainSpec reif_dom;
    ModulusSpec reif_mod{.family = "inv-log-sq"};
    std::string reif_side = "ext";
    double reif_eta = 0.5;
    int reif_kmax = 10;
    bool reif_sweep = false;
    reif_verify->add_option("--domain", reif_dom.name, "flat|tilted|log-example|power-cusp|csv")
        ->required();
    reif_verify->add_option("--slope", reif_dom.slope, "slope for tilted");
    reif_verify->add_option("--cusp-alpha", reif_dom.cusp_alpha, "exponent for power-cusp");
    reif_verify->add_option("--domain-radius", reif_dom.radius, "radius for flat/tilted/cusp");
    reif_verify->add_option("--rotate", reif_dom.rotate_by, "rigid rotation (radians)");
    reif_verify->add_option("--profile-csv", reif_dom.csv_path, "CSV profile for domain=csv");
    reif_verify->add_option("--side", reif_side, "ext|int");
    reif_verify->add_option("--modulus", reif_mod.family, "modulus family")->required();
    reif_verify->add_option("--alpha", reif_mod.alpha, "power exponent");
    reif_verify->add_option("--table", reif_mod.table_path, "modulus CSV");
    reif_verify->add_option("--eta", reif_eta, "scale ratio");
    reif_verify->add_option("--kmax", reif_kmax, "deepest scale index");
    reif_verify->add_flag("--theta-sweep", reif_sweep, "also report K(theta) over a sweep");

    // ---- solve --------------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve", "Dirichlet solve on a gridded domain");
    solve_cmd->set_help_flag("--help", "print help");  // frees -h for the spacing flag
    ShapeSpec solve_shape;
    std::string solve_mode = "laplace", solve_bc = "zero", solve_out;
    double solve_lambda = 1.0, solve_Lambda = 1.0, solve_h = 1.0 / 64.0, solve_tol = 0.0;
    solve_cmd->add_option("--shape", solve_shape.kind, "half_disc|half_cube|graph")->required();
    solve_cmd->add_option("--r", solve_shape.r, "shape radius / side");
    solve_cmd->add_option("--domain", solve_shape.domain.name, "graph profile name");
    solve_cmd->add_option("--mode", solve_mode, "sup|inf|laplace");
    solve_cmd->add_option("--lambda", solve_lambda, "lower ellipticity");
    solve_cmd->add_option("--Lambda", solve_Lambda, "upper ellipticity");
    solve_cmd->add_option("--bc", solve_bc, "zero|linear-y|flat0-arc1|bottom0-top1-sides0");
    solve_cmd->add_option("--h", solve_h, "grid spacing");
    solve_cmd->add_option("--tol", solve_tol, "residual tolerance (default: 1e-8 * data scale)");
    solve_cmd->add_option("--out", solve_out, "solution CSV path (sidecar meta JSON added)");

    // ---- probe --------------------------------------------------------------
    auto* probe = app.add_subcommand("probe", "regularity probes on a saved solution");
    std::string probe_solution;
    std::vector<double> probe_scales;
    probe->add_option("--solution", probe_solution, "solution CSV from `lab solve --out`")
        ->required();
    probe->add_option("--scales", probe_scales, "probe radii (default: dyadic)");
    auto* probe_lip = probe->add_subcommand("lipschitz", "difference quotients at 0");
    auto* probe_c1a = probe->add_subcommand("c1alpha", "first-order expansion fit at 0");
    auto* probe_hopf = probe->add_subcommand("hopf", "directional lower bound at 0");
    auto* probe_fmod = probe->add_subcommand("fmod", "scale modulus of the stored field");
    std::vector<double> hopf_dir{0.0, 1.0};
    double hopf_tmin = 0.0, hopf_tmax = 0.0;
    probe_hopf->add_option("--dir", hopf_dir, "ray direction (two components)")
        ->expected(2);
    probe_hopf->add_option("--tmin", hopf_tmin, "smallest ray parameter");
    probe_hopf->add_option("--tmax", hopf_tmax, "largest ray parameter");

    // ---- certify -------------------------------------------------------------
    auto* certify = app.add_subcommand("certify", "constant selection and induction checks");
    double cert_alpha = 0.5, cert_C1 = 1.0, cert_C2 = 1.0, cert_C3 = 1.0, cert_K = 1.0;
    ModulusSpec cert_mod{.family = "inv-log-sq"};
    int cert_kmax = 40;
    for (auto* sub : {certify}) {
        sub->add_option("--alpha", cert_alpha, "flat-boundary expansion exponent");
        sub->add_option("--C1", cert_C1, "approximation constant");
        sub->add_option("--C2", cert_C2, "slope constant");
        sub->add_option("--C3", cert_C3, "sup-norm constant");
        sub->add_option("--K", cert_K, "scale-drift bound K(eta) >= 1");
        sub->add_option("--modulus", cert_mod.family, "combined modulus family");
        sub->add_option("--modulus-alpha", cert_mod.alpha, "power exponent");
        sub->add_option("--table", cert_mod.table_path, "modulus CSV");
        sub->add_option("--kmax", cert_kmax, "scale sequence length");
    }
    auto* cert_lip = certify->add_subcommand("lipschitz", "boundary Lipschitz constants");
    auto* cert_hopf = certify->add_subcommand("hopf", "Hopf constants");
    double cert_delta1 = 0.25, cert_c2 = 0.1;
    cert_hopf->add_option("--delta1", cert_delta1, "barrier radius");
    cert_hopf->add_option("--c2", cert_c2, "barrier slope");
    auto* cert_ind = certify->add_subcommand("induction", "per-scale check on a solution");
    std::string ind_solution, ind_cert, ind_mode = "lipschitz";
    double ind_M = 0.0;
    cert_ind->add_option("--solution", ind_solution, "solution CSV")->required();
    cert_ind->add_option("--cert", ind_cert, "certificate JSON")->required();
    cert_ind->add_option("--mode", ind_mode, "lipschitz|hopf");
    cert_ind->add_option("--M", ind_M, "norm bundle M (default: sup |u|)");

    // ---- demo ----------------------------------------------------------------
    auto* demo = app.add_subcommand("demo-log-domain", "end-to-end chain on the log domain");
    demo->set_help_flag("--help", "print help");
    double demo_h = 1.0 / 512.0;
    bool demo_aux = false;
    demo->add_option("--h", demo_h, "grid spacing");
    demo->add_flag("--with-aux-solves", demo_aux, "run the per-scale auxiliary flat solves");

    // options may appear after the subcommand; unmatched ones climb the tree
    for (auto* s : {dini, dini_check, reif, reif_verify, solve_cmd, probe, probe_lip,
                    probe_c1a, probe_hopf, probe_fmod, certify, cert_lip, cert_hopf, cert_ind,
                    demo})
        s->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const OutputDir out(resolve_out_dir(out_dir_flag));
    const std::vector<std::string> invocation(argv, argv + argc);

    try {
        if (dini_check->parsed())
            return finish(scenario_dini_check(dini_spec, dini_r0, dini_tol, out), out, print_json, invocation);

        if (reif_verify->parsed())
            return finish(scenario_reifenberg_verify(reif_dom, reif_mod,
                                                     side_by_name(reif_side), reif_eta,
                                                     reif_kmax, out, reif_sweep),
                          out, print_json, invocation);

        if (solve_cmd->parsed()) {
            auto sres = scenario_solve(solve_shape, solve_mode, solve_lambda, solve_Lambda,
                                       solve_bc, solve_h, solve_tol, solve_out, out);
            return finish(sres.result, out, print_json, invocation);
        }

        if (probe->parsed()) {
            auto [dom, u] = load_solution(probe_solution);
            if (probe_lip->parsed())
                return finish(scenario_probe_lipschitz(dom, u, probe_scales, out), out, print_json, invocation);
            if (probe_c1a->parsed())
                return finish(scenario_probe_c1alpha(dom, u, probe_scales, out), out, print_json, invocation);
            if (probe_hopf->parsed()) {
                const double lo = hopf_tmin > 0 ? hopf_tmin : 4.0 * dom.h;
                const double hi = hopf_tmax > 0 ? hopf_tmax : dom.nominal_radius / 4.0;
                return finish(scenario_probe_hopf(dom, u, Vec2{hopf_dir[0], hopf_dir[1]}, lo,
                                                  hi, out),
                              out, print_json, invocation);
            }
            if (probe_fmod->parsed())
                return finish(scenario_probe_fmod(dom, u, probe_scales, 1e-6, out), out, print_json, invocation);
            std::cerr << "probe needs one of: lipschitz|c1alpha|hopf|fmod\n";
            return 1;
        }

        if (certify->parsed()) {
            ProofInputs in = ProofInputs::with_constant_K(cert_K, cert_mod.build());
            in.alpha = cert_alpha;
            in.C1 = cert_C1;
            in.C2 = cert_C2;
            in.C3 = cert_C3;
            if (cert_lip->parsed())
                return finish(scenario_certify_lipschitz(in, cert_kmax, out), out, print_json, invocation);
            if (cert_hopf->parsed())
                return finish(scenario_certify_hopf(in, cert_delta1, cert_c2, cert_kmax, out),
                              out, print_json, invocation);
            if (cert_ind->parsed()) {
                auto [dom, u] = load_solution(ind_solution);
                std::ifstream cin_(ind_cert);
                if (!cin_) throw Error("cannot read certificate " + ind_cert);
                const auto cert = cert_from_json(Json::parse(cin_));
                const ProofKind kind =
                    ind_mode == "hopf" ? ProofKind::Hopf : ProofKind::Lipschitz;
                ProofConstants pc =
                    kind == ProofKind::Hopf
                        ? select_constants_hopf(in, cert_delta1, cert_c2)
                        : select_constants_lipschitz(in);
                double M = ind_M;
                if (M <= 0.0) {
                    M = 0.0;
                    for (auto [i, j] : dom.inside_nodes)
                        M = std::max(M, std::abs(u.at(i, j)));
                }
                const ScaleSequence seq =
                    scale_sequence(in.omega, cert.eta_geo, pc.alpha0, pc.c0,
                                   static_cast<int>(cert.frames.size()) - 1,
                                   /*normalize=*/false);
                const auto rep = verify_induction(u, dom, cert, pc, seq, kind, M);
                ScenarioResult res;
                res.summary["scenario"] = "certify-induction";
                res.summary["report"] = to_json(rep);
                std::ostringstream csv;
                csv << "k,r,A_k,a_k,lhs,rhs,slack,skipped\n";
                for (const auto& row : rep.rows)
                    csv << row.k << ',' << row.r << ',' << row.A_k << ',' << row.a_k << ','
                        << row.lhs << ',' << row.rhs << ',' << row.slack << ','
                        << (row.skipped ? row.note : "") << '\n';
                out.write("induction.csv", csv.str());
                res.exit_code = 0;
                res.verdict = rep.all_checked_pass ? "induction rows hold"
                                                   : "induction rows reported (some negative)";
                out.write_json("summary.json", res.summary);
                return finish(res, out, print_json, invocation);
            }
            std::cerr << "certify needs one of: lipschitz|hopf|induction\n";
            return 1;
        }

        if (demo->parsed())
            return finish(scenario_demo_log_domain(demo_h, out, demo_aux), out, print_json, invocation);

        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const NonconvergenceError& err) {
        Json e{{"error", "nonconvergence"}, {"what", err.what()}};
        std::cerr << e.dump() << "\n";
        return 1;
    } catch (const Error& err) {
        Json e{{"error", "operational"}, {"what", err.what()}};
        std::cerr << e.dump() << "\n";
        return 1;
    } catch (const std::exception& err) {
        Json e{{"error", "unexpected"}, {"what", err.what()}};
        std::cerr << e.dump() << "\n";
        return 1;
    }
}
