#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ellab/scenarios.hpp"

using namespace ellab;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "ellab_scenario_test";
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("dini-check scenario: verdicts and exit codes") {
    const OutputDir out("");
    ModulusSpec inv_log{.family = "inv-log"};
    const auto res = scenario_dini_check(inv_log, 0.5, 1e-6, out);
    CHECK(res.exit_code == 0);
    CHECK(res.verdict == "NOT Dini");
    CHECK_FALSE(res.summary["verdict"]["is_dini"].get<bool>());

    ModulusSpec inv_log_sq{.family = "inv-log-sq"};
    const auto res2 = scenario_dini_check(inv_log_sq, 0.5, 1e-6, out);
    CHECK(res2.verdict == "Dini");
    CHECK(res2.summary["verdict"]["integral_estimate"].get<double>() ==
          doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-5));
}

TEST_CASE("solve scenario: CSV round-trip preserves the field") {
    TempDir tmp;
    const OutputDir out("");
    ShapeSpec spec{.kind = "half_disc", .r = 1.0};
    const auto sres = scenario_solve(spec, "laplace", 1.0, 1.0, "linear-y", 1.0 / 32.0, 1e-9,
                                     tmp.file("u.csv"), out);
    CHECK(sres.result.exit_code == 0);
    REQUIRE(std::filesystem::exists(tmp.file("u.csv")));
    REQUIRE(std::filesystem::exists(tmp.file("u.csv") + ".meta.json"));

    auto [dom, u] = load_solution(tmp.file("u.csv"));
    CHECK(dom.nx == sres.dom.nx);
    double diff = 0.0;
    for (auto [i, j] : dom.inside_nodes)
        diff = std::max(diff, std::abs(u.at(i, j) - sres.u.at(i, j)));
    CHECK(diff == 0.0);  // full-precision round trip
}

TEST_CASE("probe scenarios run from a reloaded solution") {
    TempDir tmp;
    const OutputDir out(tmp.file("probe_out"));
    ShapeSpec spec{.kind = "half_disc", .r = 1.0};
    scenario_solve(spec, "sup", 1.0, 2.0, "flat0-arc1", 1.0 / 32.0, 1e-8, tmp.file("u.csv"),
                   OutputDir(""));
    auto [dom, u] = load_solution(tmp.file("u.csv"));

    const auto lip = scenario_probe_lipschitz(dom, u, {}, out);
    CHECK(lip.exit_code == 0);
    CHECK(std::filesystem::exists(out.path("lipschitz.csv")));

    const auto hopf = scenario_probe_hopf(dom, u, {0.0, 1.0}, 4.0 / 32.0, 0.25, out);
    CHECK(hopf.exit_code == 0);
    CHECK(hopf.summary["table"]["c_min"].get<double>() > 0.0);

    const auto c1a = scenario_probe_c1alpha(dom, u, {1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0}, out);
    CHECK(c1a.exit_code == 0);

    const auto fm = scenario_probe_fmod(dom, u, {}, 1e-6, out);
    CHECK(fm.exit_code == 0);
}

TEST_CASE("reifenberg scenario produces a certificate summary") {
    const OutputDir out("");
    DomainSpec dom{.name = "log-example"};
    ModulusSpec mod{.family = "inv-log-sq"};
    const auto res = scenario_reifenberg_verify(dom, mod, Side::Exterior, 0.5, 6, out);
    CHECK(res.exit_code == 0);
    CHECK(res.summary["certificate"]["pass"].get<bool>());
    CHECK(res.summary.contains("limit_normal"));

    ModulusSpec lin{.family = "power", .alpha = 1.0, .radius = 0.5};
    const auto res2 = scenario_reifenberg_verify(dom, lin, Side::Exterior, 0.5, 10, out);
    CHECK(res2.exit_code == 2);  // scientific failure, not an operational error
}

TEST_CASE("certify scenarios emit constants with slack tables") {
    const OutputDir out("");
    ProofInputs in = ProofInputs::with_constant_K(2.0, Modulus::inv_log_sq());
    const auto lip = scenario_certify_lipschitz(in, 30, out);
    CHECK(lip.exit_code == 0);
    for (const auto& c : lip.summary["constants"]["constraints"])
        CHECK(c["ok"].get<bool>());

    const auto hopf = scenario_certify_hopf(in, 0.25, 0.2, 30, out);
    CHECK(hopf.exit_code == 0);
    CHECK(hopf.summary["constants"]["a_tilde"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("json reports are deterministic") {
    const OutputDir out("");
    ModulusSpec spec{.family = "inv-log-sq"};
    const auto a = scenario_dini_check(spec, 0.5, 1e-6, out);
    const auto b = scenario_dini_check(spec, 0.5, 1e-6, out);
    CHECK(a.summary.dump() == b.summary.dump());
}

TEST_CASE("demo-log-domain at desk resolution") {
    TempDir tmp;
    const OutputDir out(tmp.file("demo"));
    const auto res = scenario_demo_log_domain(1.0 / 128.0, out);
    CHECK(res.exit_code == 0);
    CHECK(res.summary["geometry"]["pass"].get<bool>());
    CHECK(res.summary["hopf_e2"]["c_min"].get<double>() > 0.0);
    CHECK(res.summary["hopf_diag"]["c_min"].get<double>() > 0.0);
    CHECK(res.summary["lipschitz_bounded"].get<bool>());
    CHECK(res.summary["barrier_c1"].get<double>() > 0.0);
    CHECK(std::filesystem::exists(out.path("summary.json")));
    CHECK(std::filesystem::exists(out.path("harmonic.csv")));
}

TEST_CASE("auxiliary flat solves report per-scale slopes") {
    const auto cert = check_reifenberg(GraphDomain2D::log_example(), Modulus::inv_log_sq(),
                                       Side::Exterior, 0.5, 6);
    REQUIRE(cert.pass);
    ProofInputs in = ProofInputs::with_constant_K(std::max(1.0, cert.fitted_K),
                                                  Modulus::inv_log_sq());
    const auto pc = select_constants_lipschitz(in);
    const auto seq = scale_sequence(in.omega, 0.5, pc.alpha0, pc.c0, 6, /*normalize=*/false);
    const auto rows = induction_aux_solves(cert, pc, seq, 1.0, 2, 3);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row["slope_along_normal"].get<double>() >= -1e-9);
        CHECK(row["boundary_top"].get<double>() > 0.0);
    }
}
