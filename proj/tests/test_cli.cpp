#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcl/cli.hpp"
#include "qcl/serialization.hpp"
#include "testutil.hpp"

using namespace qcl;

namespace {

struct TempDoc {
  std::string path;
  explicit TempDoc(const std::string& name, const Json& doc)
      : path("cli_test_" + name + ".json") {
    std::ofstream f(path);
    f << doc.dump();
  }
  ~TempDoc() { std::remove(path.c_str()); }
};

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json diag_state(std::initializer_list<double> diag) {
  Index n = static_cast<Index>(diag.size());
  CMatrix m = CMatrix::Zero(n, n);
  Index i = 0;
  for (double d : diag) m(i, i) = d, ++i;
  return save_state(State::from_density(m));
}

}  // namespace

TEST_CASE("cp check: identity passes, transpose fails") {
  TempDoc id2("id2", Json::parse(
      R"({"kind":"map","form":"schur","q":{"rows":2,"cols":2,
          "entries":[[[1,0],[1,0]],[[1,0],[1,0]]]}})"));
  RunResult r = run_cli({"cp", "check", id2.path});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("true") != std::string::npos);
  CHECK(r.out.find("min Choi eigenvalue  0") != std::string::npos);

  MatrixMap transpose = MatrixMap::from_action(
      2, 2, 2, 2, [](const CMatrix& a) { return CMatrix(a.transpose()); });
  TempDoc tr("transpose", save_map(transpose));
  r = run_cli({"cp", "check", tr.path});
  CHECK(r.exit_code == 1);
}

TEST_CASE("gauge describe half-half state") {
  TempDoc s("half", diag_state({0.5, 0.5}));
  RunResult r = run_cli({"gauge", "describe", s.path});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("(2)") != std::string::npos);
  CHECK(r.out.find("dim gauge       5") != std::string::npos);
}

TEST_CASE("conjugacy rank-one: mismatched spectra exit 1 with 'neither'") {
  TempDoc s1("third", diag_state({2.0 / 3.0, 1.0 / 3.0}));
  TempDoc s2("half", diag_state({0.5, 0.5}));
  RunResult r = run_cli({"conjugacy", "rank-one", s1.path, s2.path});
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("neither") != std::string::npos);

  r = run_cli({"conjugacy", "rank-one", s1.path, s1.path});
  CHECK(r.exit_code == 0);
}

TEST_CASE("qpos check with grid flag and json output determinism") {
  TempDoc lam("lam", Json::parse(
      R"({"kind":"map","form":"schur","q":{"rows":2,"cols":2,
          "entries":[[[1,0],[0.2,-0.4]],[[0.2,0.4],[1,0]]]}})"));
  std::vector<std::string> args{"--json", "--grid", "1e-3:1e3:15:log", "qpos", "check", lam.path};
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.out == b.out);  // byte-identical
  Json report = Json::parse(a.out);
  CHECK(report.at("command") == "qpos.check");
  CHECK(report.at("certificate").at("mode") == "exact-schur");
  CHECK(report.at("certificate").at("grid").size() == 16);
}

TEST_CASE("qpure subcommands") {
  TempDoc faithful("faithful", diag_state({0.5, 0.5}));
  CHECK(run_cli({"qpure", "rank-one", faithful.path}).exit_code == 0);

  TempDoc singular("singular", diag_state({1.0, 0.0}));
  CHECK(run_cli({"qpure", "rank-one", singular.path}).exit_code == 1);

  RunResult built = run_cli({"schur", "build-lambda", "1", "-1"});
  CHECK(built.exit_code == 0);
  Json map_doc = Json::parse(built.out);
  TempDoc lam("lam2", map_doc);
  CHECK(run_cli({"qpure", "invertible", lam.path}).exit_code == 0);

  RunResult rec = run_cli({"--json", "schur", "recover-lambda", lam.path});
  CHECK(rec.exit_code == 0);
  Json parsed = Json::parse(rec.out);
  CHECK(parsed.at("lambda")[0].get<double>() == doctest::Approx(1.0));

  // a random CP map is not recognized
  testutil::Rng rng(7);
  TempDoc generic("generic", save_map(testutil::random_cp_map(rng, 2)));
  CHECK(run_cli({"qpure", "invertible", generic.path}).exit_code == 3);
}

TEST_CASE("corner subcommands") {
  TempDoc s("half", diag_state({0.5, 0.5}));
  RunResult built = run_cli({"corner", "build-rank-one", s.path, "--x", "1"});
  REQUIRE(built.exit_code == 0);
  TempDoc gamma("gamma", Json::parse(built.out));

  Json phi = save_map(MatrixMap::rank_one_state_map(0.5 * CMatrix::Identity(2, 2)));
  TempDoc phi_doc("phi", phi);
  RunResult check =
      run_cli({"--grid", "1e-3:1e3:15:log", "corner", "check", phi_doc.path, phi_doc.path,
               gamma.path});
  CHECK(check.exit_code == 0);

  CHECK(run_cli({"corner", "hypermax", s.path, "--x", "1"}).exit_code == 0);
  RunResult inside = run_cli({"--json", "corner", "hypermax", s.path, "--lambda", "0.25,0"});
  CHECK(inside.exit_code == 1);
  CHECK(Json::parse(inside.out).at("reasons").size() == 1);

  Json eye = save_matrix(CMatrix::Identity(2, 2));
  CMatrix z = -CMatrix::Identity(2, 2);
  TempDoc x_doc("x", eye), y_doc("y", eye), z_doc("z", save_matrix(z));
  CHECK(run_cli({"corner", "app216", x_doc.path, y_doc.path, x_doc.path}).exit_code == 0);
  RunResult neg = run_cli({"--json", "corner", "app216", x_doc.path, y_doc.path, z_doc.path});
  CHECK(neg.exit_code == 0);  // lemma agrees: not positive and Z != XY
  CHECK(Json::parse(neg.out).at("is_positive") == false);
}

TEST_CASE("gauge mul and compose-verify") {
  TempDoc s("half", diag_state({0.5, 0.5}));
  CMatrix zdiag(2, 2);
  zdiag << 1, 0, 0, -1;
  State st = State::from_density(0.5 * CMatrix::Identity(2, 2));
  TempDoc g("g", save_gauge_element(GaugeElement::make(1.0, zdiag, st)));
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  TempDoc h("h", save_gauge_element(GaugeElement::make(2.0, swap, st)));

  RunResult prod = run_cli({"gauge", "mul", g.path, h.path});
  CHECK(prod.exit_code == 0);
  Json prod_doc = Json::parse(prod.out);
  CHECK(prod_doc.at("x").get<double>() == doctest::Approx(3.0));

  RunResult verify = run_cli(
      {"--grid", "1e-3:1e3:12:log", "gauge", "compose-verify", s.path, g.path, h.path});
  CHECK(verify.exit_code == 0);

  RunResult sampled = run_cli({"--grid", "1e-3:1e3:12:log", "--seed", "5", "gauge",
                               "compose-verify", s.path, "--random", "2"});
  CHECK(sampled.exit_code == 0);
}

TEST_CASE("weight subcommands") {
  TempDoc w("indicator", Json::parse(R"({"kind":"weight","family":"indicator","a":0,"b":1})"));
  RunResult moments = run_cli({"--json", "weight", "moments", w.path, "--t", "0.5"});
  CHECK(moments.exit_code == 0);
  Json m = Json::parse(moments.out);
  CHECK(m.at("nu_I").get<double>() == doctest::Approx(0.974077).epsilon(1e-6));
  CHECK(m.at("nu_Lambda").get<double>() == doctest::Approx(0.474077).epsilon(1e-6));

  RunResult analyze = run_cli({"--json", "weight", "analyze", w.path});
  CHECK(analyze.exit_code == 0);
  CHECK(Json::parse(analyze.out).at("type") == "type_II");

  TempDoc off("off", Json::parse(R"({"kind":"weight","family":"indicator","a":1,"b":2})"));
  CHECK(Json::parse(run_cli({"--json", "weight", "analyze", off.path}).out).at("type") ==
        "type_I");

  TempDoc id1("id1", Json::parse(
      R"({"kind":"map","form":"schur","q":{"rows":1,"cols":1,"entries":[[[1,0]]]}})"));
  RunResult brep = run_cli({"--json", "weight", "brep", id1.path, w.path, "--t", "0.5"});
  CHECK(brep.exit_code == 0);
  double pi00 =
      Json::parse(brep.out).at("pi_t_of_identity").at("entries")[0][0][0].get<double>();
  CHECK(pi00 == doctest::Approx(0.660805).epsilon(1e-6));

  CHECK(run_cli({"weight", "kappa", w.path, "--u", "1"}).out.find("0") != std::string::npos);
  RunResult kinf = run_cli({"--json", "weight", "kappa", w.path, "--u", "-1"});
  CHECK(Json::parse(kinf.out).at("kappa") == "infinity");

  CHECK(run_cli({"weight", "qcorner", w.path, "--x", "1"}).exit_code == 0);
  CHECK(run_cli({"weight", "qcorner", w.path, "--x", "-0.1"}).exit_code == 1);

  CHECK(run_cli({"weight", "subordinate", w.path, w.path}).exit_code == 0);
  TempDoc expw("exp", Json::parse(R"({"kind":"weight","family":"exponential"})"));
  CHECK(run_cli({"weight", "subordinate", w.path, expw.path}).exit_code == 1);
}

TEST_CASE("covariance check") {
  testutil::Rng rng(11);
  TempDoc w("indicator", Json::parse(R"({"kind":"weight","family":"indicator","a":0,"b":1})"));
  TempDoc phi("phi", save_map(MatrixMap::rank_one_state_map(testutil::random_density(rng, 2))));
  TempDoc u("u", save_matrix(testutil::random_unitary(rng, 2)));
  RunResult r = run_cli({"--seed", "3", "covariance", "check", phi.path, u.path, w.path, "--t",
                         "0.5"});
  CHECK(r.exit_code == 0);
}

TEST_CASE("usage and schema errors exit 2, inconclusive exits 3") {
  CHECK(run_cli({"nonsense"}).exit_code == 2);
  CHECK(run_cli({"cp", "check", "no_such_file.json"}).exit_code == 2);

  TempDoc bad("bad", Json::parse(R"({"kind":"matrix","rows":1,"cols":1,"entries":[]})"));
  CHECK(run_cli({"cp", "check", bad.path}).exit_code == 2);

  // moments at t <= 0 on a type II weight: numerically inconclusive domain
  TempDoc w("indicator", Json::parse(R"({"kind":"weight","family":"indicator","a":0,"b":1})"));
  CHECK(run_cli({"weight", "moments", w.path, "--t", "0"}).exit_code == 3);

  CHECK(run_cli({"--help"}).exit_code == 0);
}
