#include "qcl/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "qcl/corners.hpp"
#include "qcl/gauge.hpp"
#include "qcl/serialization.hpp"

namespace qcl::cli {

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", round_sig(x));
  return buf;
}

std::string fmt(Complex z) { return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") +
                                    fmt(std::abs(z.imag())) + "i"; }

Complex parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char sep = 0;
  if (!(in >> re)) fail(Errc::SchemaError, "cannot parse complex value '" + text + "'");
  if (in >> sep) {
    if (sep != ',' || !(in >> im))
      fail(Errc::SchemaError, "complex values are 're' or 're,im', got '" + text + "'");
  }
  return {re, im};
}

struct Context {
  Tolerance tol;
  std::string grid_spec;
  bool json = false;
  unsigned long seed = 0;
  std::ostream* out = nullptr;

  TGrid grid() const {
    if (grid_spec.empty()) return TGrid::default_grid();
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(grid_spec);
    while (std::getline(in, token, ':')) parts.push_back(token);
    if (parts.size() != 4) fail(Errc::SchemaError, "--grid expects t0:t1:count:log|lin");
    double t0 = std::stod(parts[0]), t1 = std::stod(parts[1]);
    int count = std::stoi(parts[2]);
    if (parts[3] == "log") return TGrid::log_grid(t0, t1, count);
    if (parts[3] == "lin") {
      if (!(t0 > 0.0) || !(t1 > t0) || count < 2)
        fail(Errc::SchemaError, "--grid lin expects 0 < t0 < t1 and count >= 2");
      TGrid g;
      g.ts.push_back(0.0);
      for (int k = 0; k < count; ++k)
        g.ts.push_back(t0 + (t1 - t0) * k / (count - 1));
      g.validate();
      return g;
    }
    fail(Errc::SchemaError, "--grid mode must be 'log' or 'lin'");
  }

  void emit(const Json& report, const std::function<void(std::ostream&)>& human) const {
    if (json)
      *out << report.dump(2) << "\n";
    else
      human(*out);
  }
};

Document load_kind(const std::string& path, Document::Kind kind, const char* what) {
  Document doc = load_document_file(path);
  if (doc.kind != kind) fail(Errc::SchemaError, path + " is not a " + what + " document");
  return doc;
}

MatrixMap load_map(const std::string& path) {
  return load_kind(path, Document::Kind::Map, "map").map();
}
State load_state(const std::string& path) {
  return load_kind(path, Document::Kind::State, "state").state();
}
PowersWeight load_weight(const std::string& path) {
  return load_kind(path, Document::Kind::Weight, "weight").weight();
}
CMatrix load_matrix(const std::string& path) {
  return load_kind(path, Document::Kind::Matrix, "matrix").matrix();
}
GaugeElement load_gauge(const std::string& path) {
  return load_kind(path, Document::Kind::GaugeElement, "gauge_element").gauge_element();
}

Json certificate_json(const PsdCertificate& cert) {
  Json j;
  j["verdict"] = cert.verdict;
  j["mode"] = cert.mode == CertMode::ExactSchur ? "exact-schur" : "numeric-grid";
  j["spectrum_ok"] = cert.spectrum_ok;
  Json grid = Json::array(), eigs = Json::array(), skipped = Json::array();
  for (double t : cert.grid) grid.push_back(round_sig(t));
  for (double m : cert.min_eigs) eigs.push_back(round_sig(m));
  for (double t : cert.skipped) skipped.push_back(round_sig(t));
  j["grid"] = std::move(grid);
  j["min_eigs"] = std::move(eigs);
  j["skipped"] = std::move(skipped);
  return j;
}

void print_certificate(std::ostream& os, const PsdCertificate& cert) {
  double worst = cert.min_eigs.empty() ? 0.0 : cert.min_eigs[0];
  double worst_t = cert.grid.empty() ? 0.0 : cert.grid[0];
  for (std::size_t k = 0; k < cert.min_eigs.size(); ++k)
    if (cert.min_eigs[k] < worst) worst = cert.min_eigs[k], worst_t = cert.grid[k];
  os << "verdict            " << (cert.verdict ? "true" : "false") << "\n"
     << "mode               "
     << (cert.mode == CertMode::ExactSchur ? "exact-schur" : "numeric-grid") << "\n"
     << "grid points        " << cert.grid.size() << "\n"
     << "worst min eig      " << fmt(worst) << "  (at t = " << fmt(worst_t) << ")\n";
  if (!cert.spectrum_ok) os << "spectrum           eigenvalue on the open negative real axis\n";
  if (!cert.skipped.empty()) os << "skipped t values   " << cert.skipped.size() << "\n";
}

void write_output(const Context& ctx, const Json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    *ctx.out << doc.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) fail(Errc::SchemaError, "cannot write " + out_path);
    f << doc.dump(2) << "\n";
  }
}

TestOperatorMatrix random_test_matrix(Index n, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  auto fn = [&]() {
    RVector xs(9);
    for (Index i = 0; i < 9; ++i) xs(i) = 0.05 + (3.0 - 0.05) * double(i) / 8.0;
    CVector vals(9);
    for (Index i = 0; i < 9; ++i) vals(i) = Complex(dist(rng), dist(rng));
    return TestFunction{xs, vals};
  };
  TestOperatorMatrix b(static_cast<std::size_t>(n),
                       std::vector<TestOperator>(static_cast<std::size_t>(n)));
  for (auto& row : b)
    for (auto& op : row)
      op.kernels.push_back({Complex(dist(rng), dist(rng)), fn(), fn()});
  return b;
}

int exit_verdict(bool affirmative) { return affirmative ? kExitYes : kExitNo; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;

  CLI::App app{"qcorner-lab: positivity calculus for q-positive maps and Powers-weight data"};
  app.require_subcommand(1);
  app.add_option("--grid", ctx.grid_spec, "certification grid t0:t1:count:log|lin");
  app.add_option("--tol-psd", ctx.tol.eps_psd, "relative PSD eigenvalue floor");
  app.add_option("--tol-eq", ctx.tol.eps_eq, "entrywise equality tolerance");
  app.add_flag("--json", ctx.json, "machine-readable report on stdout");
  app.add_option("--seed", ctx.seed, "seed for sampled inputs");

  std::function<int()> handler;
  auto bind = [&handler](CLI::App* cmd, std::function<int()> fn) {
    cmd->callback([&handler, fn] { handler = fn; });
  };

  // ---- cp ----
  auto* cp = app.add_subcommand("cp", "complete positivity");
  {
    auto* check = cp->add_subcommand("check", "Choi PSD certificate for a map");
    auto path = std::make_shared<std::string>();
    check->add_option("map", *path, "map document")->required();
    bind(check, [&ctx, path] {
      CpVerdict v = is_completely_positive(load_map(*path), ctx.tol);
      Json j;
      j["command"] = "cp.check";
      j["verdict"] = v.verdict;
      j["min_choi_eigenvalue"] = round_sig(v.min_eig);
      ctx.emit(j, [&](std::ostream& os) {
        os << "completely positive  " << (v.verdict ? "true" : "false") << "\n"
           << "min Choi eigenvalue  " << fmt(v.min_eig) << "\n";
      });
      return exit_verdict(v.verdict);
    });
  }

  // ---- qpos ----
  auto* qp = app.add_subcommand("qpos", "q-positivity calculus");
  {
    auto* check = qp->add_subcommand("check", "grid certificate for phi >=_q 0");
    auto path = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("auto");
    check->add_option("map", *path, "map document")->required();
    check->add_option("--mode", *mode, "auto|exact|numeric")->check(
        CLI::IsMember({"auto", "exact", "numeric"}));
    bind(check, [&ctx, path, mode] {
      CertMode m = *mode == "exact"     ? CertMode::ExactSchur
                   : *mode == "numeric" ? CertMode::NumericGrid
                                        : CertMode::Auto;
      PsdCertificate cert = certify_q_positive(load_map(*path), ctx.grid(), ctx.tol, m);
      Json j;
      j["command"] = "qpos.check";
      j["certificate"] = certificate_json(cert);
      ctx.emit(j, [&](std::ostream& os) { print_certificate(os, cert); });
      return exit_verdict(cert.verdict);
    });

    auto* dom = qp->add_subcommand("dominates", "grid certificate for phi >=_q psi");
    auto p1 = std::make_shared<std::string>(), p2 = std::make_shared<std::string>();
    dom->add_option("phi", *p1, "map document")->required();
    dom->add_option("psi", *p2, "map document")->required();
    bind(dom, [&ctx, p1, p2] {
      PsdCertificate cert = q_dominates(load_map(*p1), load_map(*p2), ctx.grid(), ctx.tol);
      Json j;
      j["command"] = "qpos.dominates";
      j["certificate"] = certificate_json(cert);
      ctx.emit(j, [&](std::ostream& os) { print_certificate(os, cert); });
      return exit_verdict(cert.verdict);
    });

    auto* spec = qp->add_subcommand("spectrum", "spectrum of the map on matrix space");
    auto path2 = std::make_shared<std::string>();
    spec->add_option("map", *path2, "map document")->required();
    bind(spec, [&ctx, path2] {
      SpectrumReport r = map_spectrum(load_map(*path2), ctx.tol);
      Json j;
      j["command"] = "qpos.spectrum";
      j["negative_axis_flag"] = r.negative_axis_flag;
      Json evs = Json::array();
      for (Complex ev : r.eigenvalues) evs.push_back(complex_json(ev));
      j["eigenvalues"] = std::move(evs);
      ctx.emit(j, [&](std::ostream& os) {
        os << "eigenvalues (" << r.eigenvalues.size() << ")\n";
        for (Complex ev : r.eigenvalues) os << "  " << fmt(ev) << "\n";
        os << "negative real axis hit  " << (r.negative_axis_flag ? "yes" : "no") << "\n";
      });
      return exit_verdict(!r.negative_axis_flag);
    });
  }

  // ---- qpure ----
  auto* qpure = app.add_subcommand("qpure", "q-purity decisions in the classified families");
  {
    auto* rank1 = qpure->add_subcommand("rank-one", "faithfulness of the defining state");
    auto path = std::make_shared<std::string>();
    rank1->add_option("state", *path, "state document")->required();
    bind(rank1, [&ctx, path] {
      bool pure = is_q_pure_rank_one(load_state(*path), ctx.tol);
      Json j;
      j["command"] = "qpure.rank-one";
      j["q_pure"] = pure;
      ctx.emit(j, [&](std::ostream& os) {
        os << "q-pure  " << (pure ? "true (state is faithful)" : "false (state not faithful)")
           << "\n";
      });
      return exit_verdict(pure);
    });

    auto* inv = qpure->add_subcommand("invertible", "recognition of the canonical Schur form");
    auto path2 = std::make_shared<std::string>();
    inv->add_option("map", *path2, "map document")->required();
    bind(inv, [&ctx, path2] {
      MatrixMap phi = load_map(*path2);
      try {
        RVector lambda = recover_lambda(phi, ctx.tol);
        Json j;
        j["command"] = "qpure.invertible";
        j["q_pure"] = true;
        Json lam = Json::array();
        for (Index i = 0; i < lambda.size(); ++i) lam.push_back(round_sig(lambda(i)));
        j["lambda"] = std::move(lam);
        ctx.emit(j, [&](std::ostream& os) {
          os << "q-pure  true (canonical Schur form)\nlambda ";
          for (Index i = 0; i < lambda.size(); ++i) os << " " << fmt(lambda(i));
          os << "\n";
        });
        return kExitYes;
      } catch (const Error& e) {
        if (e.code() != Errc::NotSchur && e.code() != Errc::NotCanonical) throw;
        Json j;
        j["command"] = "qpure.invertible";
        j["q_pure"] = nullptr;
        j["reason"] = "recognition beyond the canonical Schur basis is out of scope";
        ctx.emit(j, [&](std::ostream& os) {
          os << "q-pure  undecided (map is not in canonical Schur form)\n";
        });
        return kExitInconclusive;
      }
    });
  }

  // ---- schur ----
  auto* schur = app.add_subcommand("schur", "canonical lambda-Schur forms");
  {
    auto* rec = schur->add_subcommand("recover-lambda", "invert the Schur coefficients");
    auto path = std::make_shared<std::string>();
    rec->add_option("map", *path, "map document")->required();
    bind(rec, [&ctx, path] {
      try {
        RVector lambda = recover_lambda(load_map(*path), ctx.tol);
        Json j;
        j["command"] = "schur.recover-lambda";
        j["ok"] = true;
        Json lam = Json::array();
        for (Index i = 0; i < lambda.size(); ++i) lam.push_back(round_sig(lambda(i)));
        j["lambda"] = std::move(lam);
        ctx.emit(j, [&](std::ostream& os) {
          os << "lambda ";
          for (Index i = 0; i < lambda.size(); ++i) os << " " << fmt(lambda(i));
          os << "\n";
        });
        return kExitYes;
      } catch (const Error& e) {
        if (e.code() != Errc::NotSchur && e.code() != Errc::NotCanonical) throw;
        Json j;
        j["command"] = "schur.recover-lambda";
        j["ok"] = false;
        j["error"] = e.what();
        ctx.emit(j, [&](std::ostream& os) { os << "not canonical: " << e.what() << "\n"; });
        return kExitNo;
      }
    });

    auto* build = schur->add_subcommand("build-lambda", "emit the canonical map document");
    auto lambda = std::make_shared<std::vector<double>>();
    auto out_path = std::make_shared<std::string>();
    build->add_option("lambda", *lambda, "zero-sum entries")->required()->expected(-1);
    build->add_option("-o,--output", *out_path, "output file (default stdout)");
    bind(build, [&ctx, lambda, out_path] {
      RVector v(static_cast<Index>(lambda->size()));
      for (std::size_t i = 0; i < lambda->size(); ++i) v(static_cast<Index>(i)) = (*lambda)[i];
      write_output(ctx, save_map(build_lambda_schur(v, ctx.tol)), *out_path);
      return kExitYes;
    });
  }

  // ---- corner ----
  auto* corner = app.add_subcommand("corner", "corners and q-corners");
  {
    auto* check = corner->add_subcommand("check", "q-corner certificate for (phi, psi, gamma)");
    auto p1 = std::make_shared<std::string>(), p2 = std::make_shared<std::string>(),
         p3 = std::make_shared<std::string>();
    check->add_option("phi", *p1)->required();
    check->add_option("psi", *p2)->required();
    check->add_option("gamma", *p3)->required();
    bind(check, [&ctx, p1, p2, p3] {
      CornerSpec spec{load_map(*p1), load_map(*p2), load_map(*p3)};
      CpVerdict corner_v = is_corner(spec, ctx.tol);
      PsdCertificate cert = is_q_corner(spec, ctx.grid(), ctx.tol);
      Json j;
      j["command"] = "corner.check";
      j["is_corner"] = corner_v.verdict;
      j["min_choi_eigenvalue"] = round_sig(corner_v.min_eig);
      j["certificate"] = certificate_json(cert);
      ctx.emit(j, [&](std::ostream& os) {
        os << "corner (CP at t=0)  " << (corner_v.verdict ? "true" : "false") << "\n";
        print_certificate(os, cert);
      });
      return exit_verdict(cert.verdict);
    });

    auto make_params = [](const std::string& state_path, const std::string& unitary_path,
                          const std::string& lambda_text, double x, bool have_lambda) {
      State s = load_state(state_path);
      CMatrix xm = unitary_path.empty()
                       ? CMatrix(CMatrix::Identity(s.dim(), s.dim()))
                       : load_matrix(unitary_path);
      return have_lambda ? RankOneCornerParams::from_lambda(parse_complex(lambda_text), xm, s)
                         : RankOneCornerParams::from_x(x, xm, s);
    };

    auto* build = corner->add_subcommand("build-rank-one", "emit gamma_{x,X} as a map document");
    auto bs = std::make_shared<std::string>();
    auto bu = std::make_shared<std::string>();
    auto bl = std::make_shared<std::string>();
    auto bx = std::make_shared<double>(0.0);
    auto bo = std::make_shared<std::string>();
    build->add_option("state", *bs, "state document")->required();
    build->add_option("--x", *bx, "real parameter, lambda = 1/(1+ix)");
    auto* bl_opt = build->add_option("--lambda", *bl, "complex lambda 're,im'");
    build->add_option("--unitary", *bu, "matrix document for X (default I)");
    build->add_option("-o,--output", *bo, "output file (default stdout)");
    bind(build, [&ctx, bs, bu, bl, bx, bo, bl_opt, make_params] {
      RankOneCornerParams p = make_params(*bs, *bu, *bl, *bx, bl_opt->count() > 0);
      write_output(ctx, save_map(build_rank_one_qcorner(p, ctx.tol)), *bo);
      return kExitYes;
    });

    auto* hyp = corner->add_subcommand("hypermax", "hyper-maximality of the rank-one corner");
    auto hs = std::make_shared<std::string>();
    auto hu = std::make_shared<std::string>();
    auto hl = std::make_shared<std::string>();
    auto hx = std::make_shared<double>(0.0);
    hyp->add_option("state", *hs, "state document")->required();
    hyp->add_option("--x", *hx, "real parameter, lambda = 1/(1+ix)");
    auto* hl_opt = hyp->add_option("--lambda", *hl, "complex lambda 're,im'");
    hyp->add_option("--unitary", *hu, "matrix document for X (default I)");
    bind(hyp, [&ctx, hs, hu, hl, hx, hl_opt, make_params] {
      RankOneCornerParams p = make_params(*hs, *hu, *hl, *hx, hl_opt->count() > 0);
      HypermaxVerdict v = is_hypermax_rank_one(p, ctx.tol);
      Json j;
      j["command"] = "corner.hypermax";
      j["verdict"] = v.verdict;
      j["reasons"] = v.reasons;
      ctx.emit(j, [&](std::ostream& os) {
        os << "hyper-maximal  " << (v.verdict ? "true" : "false") << "\n";
        for (const std::string& r : v.reasons) os << "  reason: " << r << "\n";
      });
      return exit_verdict(v.verdict);
    });

    auto* app216 = corner->add_subcommand("app216", "3x3 unitary positivity lemma");
    auto ax = std::make_shared<std::string>(), ay = std::make_shared<std::string>(),
         az = std::make_shared<std::string>();
    app216->add_option("X", *ax)->required();
    app216->add_option("Y", *ay)->required();
    app216->add_option("Z", *az)->required();
    bind(app216, [&ctx, ax, ay, az] {
      App216Result r = check_app216(load_matrix(*ax), load_matrix(*ay), load_matrix(*az), ctx.tol);
      Json j;
      j["command"] = "corner.app216";
      j["is_positive"] = r.is_positive;
      j["equivalence_holds"] = r.equivalence_holds;
      j["min_eigenvalue"] = round_sig(r.min_eig);
      j["z_residual"] = round_sig(r.z_residual);
      ctx.emit(j, [&](std::ostream& os) {
        os << "T positive       " << (r.is_positive ? "true" : "false") << "\n"
           << "||Z - XY||_max   " << fmt(r.z_residual) << "\n"
           << "lemma agrees     " << (r.equivalence_holds ? "true" : "false") << "\n";
      });
      return exit_verdict(r.equivalence_holds);
    });
  }

  // ---- gauge ----
  auto* gauge = app.add_subcommand("gauge", "gauge-group descriptors and the group law");
  {
    auto* describe = gauge->add_subcommand("describe", "U_rho block structure and dimensions");
    auto path = std::make_shared<std::string>();
    describe->add_option("state", *path, "state document")->required();
    bind(describe, [&ctx, path] {
      GaugeDescriptor d = describe_gauge_group(load_state(*path), ctx.tol);
      Json j;
      j["command"] = "gauge.describe";
      j["multiplicities"] = d.multiplicities;
      j["kernel_multiplicity"] = d.kernel_multiplicity;
      j["dim_u_rho"] = d.dim_u_rho;
      j["dim_gauge"] = d.dim_gauge;
      j["dim_u_rho_oracle"] = d.dim_u_rho_oracle;
      j["oracle_agrees"] = d.oracle_agrees;
      ctx.emit(j, [&](std::ostream& os) {
        os << "multiplicities  (";
        for (std::size_t i = 0; i < d.multiplicities.size(); ++i)
          os << (i ? "," : "") << d.multiplicities[i];
        os << ")  kernel " << d.kernel_multiplicity << "\n"
           << "dim U_rho       " << d.dim_u_rho << " (oracle " << d.dim_u_rho_oracle << ")\n"
           << "dim gauge       " << d.dim_gauge << "\n";
      });
      return exit_verdict(d.oracle_agrees);
    });

    auto* mul = gauge->add_subcommand("mul", "product {x,X}.{y,Y} = {x+y, XY}");
    auto g1 = std::make_shared<std::string>(), g2 = std::make_shared<std::string>();
    auto mo = std::make_shared<std::string>();
    mul->add_option("gelem", *g1)->required();
    mul->add_option("helem", *g2)->required();
    mul->add_option("-o,--output", *mo, "output file (default stdout)");
    bind(mul, [&ctx, g1, g2, mo] {
      GaugeElement prod = gauge_canonical(gauge_mul(load_gauge(*g1), load_gauge(*g2), ctx.tol));
      write_output(ctx, save_gauge_element(prod), *mo);
      return kExitYes;
    });

    auto* verify = gauge->add_subcommand("compose-verify",
                                         "3x3 certificate for the group law {x+y, XY}");
    auto vs = std::make_shared<std::string>();
    auto vg = std::make_shared<std::string>(), vh = std::make_shared<std::string>();
    auto random_count = std::make_shared<int>(0);
    verify->add_option("state", *vs, "state document")->required();
    verify->add_option("gelem", *vg, "gauge element document");
    verify->add_option("helem", *vh, "gauge element document");
    verify->add_option("--random", *random_count,
                       "verify this many seeded random pairs instead of documents");
    bind(verify, [&ctx, vs, vg, vh, random_count] {
      State s = load_state(*vs);
      std::vector<std::pair<GaugeElement, GaugeElement>> pairs;
      if (*random_count > 0) {
        std::mt19937_64 rng(ctx.seed);
        std::uniform_real_distribution<double> xs(-3.0, 3.0);
        for (int k = 0; k < *random_count; ++k) {
          // random commuting unitaries: blockwise in the eigenbasis
          auto random_u = [&] {
            Index n = s.dim();
            CMatrix blocks = CMatrix::Zero(n, n);
            Index start = 0;
            const RVector& ev = s.eigenvalues();
            for (Index i = 1; i <= n; ++i) {
              if (i == n || ev(i) - ev(i - 1) > ctx.tol.eps_cluster) {
                Index len = i - start;
                CMatrix g(len, len);
                std::normal_distribution<double> nd(0.0, 1.0);
                for (Index r = 0; r < len; ++r)
                  for (Index c = 0; c < len; ++c) g(r, c) = Complex(nd(rng), nd(rng));
                Eigen::HouseholderQR<CMatrix> qr(g);
                blocks.block(start, start, len, len) = qr.householderQ();
                start = i;
              }
            }
            return CMatrix(s.eigenvectors() * blocks * s.eigenvectors().adjoint());
          };
          pairs.emplace_back(GaugeElement::make(xs(rng), random_u(), s, ctx.tol),
                             GaugeElement::make(xs(rng), random_u(), s, ctx.tol));
        }
      } else {
        if (vg->empty() || vh->empty())
          fail(Errc::SchemaError, "compose-verify needs g and h documents or --random K");
        pairs.emplace_back(load_gauge(*vg), load_gauge(*vh));
      }
      bool all_ok = true;
      Json results = Json::array();
      for (const auto& [g, h] : pairs) {
        GaugeCompositionCertificate cert =
            verify_gauge_composition(s, g, h, ctx.grid(), ctx.tol);
        bool ok = cert.full.verdict && cert.fast_verdict && cert.paths_agree;
        all_ok = all_ok && ok;
        Json r;
        r["x"] = round_sig(g.x());
        r["y"] = round_sig(h.x());
        r["full"] = certificate_json(cert.full);
        r["fast_verdict"] = cert.fast_verdict;
        r["paths_agree"] = cert.paths_agree;
        results.push_back(std::move(r));
      }
      Json j;
      j["command"] = "gauge.compose-verify";
      j["verdict"] = all_ok;
      j["results"] = std::move(results);
      ctx.emit(j, [&](std::ostream& os) {
        os << "pairs verified  " << pairs.size() << "\n"
           << "verdict         " << (all_ok ? "true" : "false") << "\n";
      });
      return exit_verdict(all_ok);
    });
  }

  // ---- conjugacy ----
  auto* conj = app.add_subcommand("conjugacy", "equivalence decisions");
  {
    auto* rank1 = conj->add_subcommand("rank-one", "conjugacy of two rank-one doubles");
    auto p1 = std::make_shared<std::string>(), p2 = std::make_shared<std::string>();
    rank1->add_option("state1", *p1)->required();
    rank1->add_option("state2", *p2)->required();
    bind(rank1, [&ctx, p1, p2] {
      EquivalenceDecision d =
          decide_rank_one_equivalence(load_state(*p1), load_state(*p2), ctx.tol);
      Json j;
      j["command"] = "conjugacy.rank-one";
      j["conjugate"] = d.conjugate;
      j["cocycle_conjugate"] = d.cocycle_conjugate;
      Json s1 = Json::array(), s2 = Json::array();
      for (Index i = 0; i < d.spectrum_1.size(); ++i) s1.push_back(round_sig(d.spectrum_1(i)));
      for (Index i = 0; i < d.spectrum_2.size(); ++i) s2.push_back(round_sig(d.spectrum_2(i)));
      j["spectrum_1"] = std::move(s1);
      j["spectrum_2"] = std::move(s2);
      ctx.emit(j, [&](std::ostream& os) {
        os << "decision  "
           << (d.conjugate ? "conjugate and cocycle-conjugate" : "neither") << "\n";
      });
      return exit_verdict(d.conjugate);
    });

    auto* vw = conj->add_subcommand("vs-weight-only",
                                    "cocycle conjugacy against the weight-only semigroup");
    auto path = std::make_shared<std::string>();
    vw->add_option("doc", *path, "state document (rank-one) or map document (invertible)")
        ->required();
    bind(vw, [&ctx, path] {
      Document doc = load_document_file(*path);
      WeightOnlyDecision d;
      if (doc.kind == Document::Kind::State)
        d = decide_vs_weight_only(doc.state(), ctx.tol);
      else if (doc.kind == Document::Kind::Map)
        d = decide_vs_weight_only(doc.map(), ctx.tol);
      else
        fail(Errc::SchemaError, "vs-weight-only expects a state or map document");
      Json j;
      j["command"] = "conjugacy.vs-weight-only";
      j["decision"] = to_string(d);
      ctx.emit(j, [&](std::ostream& os) { os << "decision  " << to_string(d) << "\n"; });
      switch (d) {
        case WeightOnlyDecision::CocycleConjugateToWeightOnly: return kExitYes;
        case WeightOnlyDecision::NotCocycleConjugate: return kExitNo;
        case WeightOnlyDecision::Undecided: return kExitInconclusive;
      }
      return kExitInconclusive;
    });
  }

  // ---- weight ----
  auto* weight = app.add_subcommand("weight", "Powers-weight numerics");
  {
    auto* analyze = weight->add_subcommand("analyze", "type classification with diagnostics");
    auto path = std::make_shared<std::string>();
    analyze->add_option("weight", *path)->required();
    bind(analyze, [&ctx, path] {
      WeightClassification cls = load_weight(*path).classify();
      Json j;
      j["command"] = "weight.analyze";
      j["type"] = cls.type == WeightType::TypeII ? "type_II" : "type_I";
      Json diag = Json::array();
      for (const WeightMoments& m : cls.diagnostics) {
        Json row;
        row["t"] = round_sig(m.t);
        row["nu_I"] = round_sig(m.nu_I);
        row["nu_Lambda"] = round_sig(m.nu_Lambda);
        diag.push_back(std::move(row));
      }
      j["diagnostics"] = std::move(diag);
      ctx.emit(j, [&](std::ostream& os) {
        os << "type  " << (cls.type == WeightType::TypeII ? "type_II" : "type_I") << "\n";
        for (const WeightMoments& m : cls.diagnostics)
          os << "  t = " << fmt(m.t) << "   nu_t(I) = " << fmt(m.nu_I)
             << "   nu_t(Lambda) = " << fmt(m.nu_Lambda) << "\n";
      });
      return kExitYes;
    });

    auto* moments = weight->add_subcommand("moments", "truncated moments at t");
    auto mp = std::make_shared<std::string>();
    auto mt = std::make_shared<double>(0.5);
    moments->add_option("weight", *mp)->required();
    moments->add_option("--t", *mt, "truncation point")->required();
    bind(moments, [&ctx, mp, mt] {
      WeightMoments m = load_weight(*mp).moments(*mt);
      Json j;
      j["command"] = "weight.moments";
      j["t"] = round_sig(m.t);
      j["nu_I"] = round_sig(m.nu_I);
      j["nu_Lambda"] = round_sig(m.nu_Lambda);
      ctx.emit(j, [&](std::ostream& os) {
        os << "nu_t(I)       " << fmt(m.nu_I) << "\n"
           << "nu_t(Lambda)  " << fmt(m.nu_Lambda) << "\n";
      });
      return kExitYes;
    });

    auto* brep = weight->add_subcommand("brep", "boundary representation pi_t(I)");
    auto bm = std::make_shared<std::string>(), bw = std::make_shared<std::string>();
    auto bt = std::make_shared<double>(0.5);
    brep->add_option("map", *bm)->required();
    brep->add_option("weight", *bw)->required();
    brep->add_option("--t", *bt)->required();
    bind(brep, [&ctx, bm, bw, bt] {
      MatrixMap phi = load_map(*bm);
      CMatrix pi = boundary_rep_double(phi, load_weight(*bw), *bt,
                                       identity_test_matrix(phi.n_in()), ctx.tol);
      Json j;
      j["command"] = "weight.brep";
      j["t"] = round_sig(*bt);
      j["pi_t_of_identity"] = matrix_payload(pi);
      ctx.emit(j, [&](std::ostream& os) {
        os << "pi_t(I) =\n";
        for (Index r = 0; r < pi.rows(); ++r) {
          os << "  ";
          for (Index c = 0; c < pi.cols(); ++c) os << fmt(pi(r, c)) << "  ";
          os << "\n";
        }
      });
      return kExitYes;
    });

    auto* kappa = weight->add_subcommand("kappa", "kappa(u) for a scalar contraction");
    auto kp = std::make_shared<std::string>();
    auto ku = std::make_shared<std::string>("1");
    kappa->add_option("weight", *kp)->required();
    kappa->add_option("--u", *ku, "scalar contraction 're,im'")->required();
    bind(kappa, [&ctx, kp, ku] {
      Kappa k = kappa_scalar(load_weight(*kp), parse_complex(*ku), ctx.grid(), ctx.tol);
      Json j;
      j["command"] = "weight.kappa";
      if (k.infinite)
        j["kappa"] = "infinity";
      else
        j["kappa"] = round_sig(k.value);
      ctx.emit(j, [&](std::ostream& os) {
        os << "kappa  " << (k.infinite ? std::string("infinity") : fmt(k.value)) << "\n";
      });
      return kExitYes;
    });

    auto* qc = weight->add_subcommand("qcorner", "q-corner test for gamma = nu/(1+x)");
    auto qp2 = std::make_shared<std::string>();
    auto qx = std::make_shared<std::string>("0");
    qc->add_option("weight", *qp2)->required();
    qc->add_option("--x", *qx, "complex parameter 're,im'")->required();
    bind(qc, [&ctx, qp2, qx] {
      WeightQcornerCertificate c =
          weight_qcorner_check(load_weight(*qp2), parse_complex(*qx), ctx.grid(), ctx.tol);
      Json j;
      j["command"] = "weight.qcorner";
      j["verdict"] = c.cert.verdict;
      j["hyper_maximal"] = c.hyper_maximal;
      j["tail_violation"] = c.tail_violation;
      j["certificate"] = certificate_json(c.cert);
      ctx.emit(j, [&](std::ostream& os) {
        os << "q-corner       " << (c.cert.verdict ? "true" : "false") << "\n"
           << "hyper-maximal  " << (c.hyper_maximal ? "true" : "false") << "\n";
        if (c.tail_violation) os << "fails as t -> 0+ (type II tail)\n";
      });
      return exit_verdict(c.cert.verdict);
    });

    auto* sub = weight->add_subcommand("subordinate", "nu >=_q eta for rank-one weights");
    auto s1 = std::make_shared<std::string>(), s2 = std::make_shared<std::string>();
    sub->add_option("nu", *s1)->required();
    sub->add_option("eta", *s2)->required();
    bind(sub, [&ctx, s1, s2] {
      SubordinationReport r =
          weight_q_subordinate(load_weight(*s1), load_weight(*s2), ctx.grid(), ctx.tol);
      Json j;
      j["command"] = "weight.subordinate";
      j["verdict"] = r.verdict;
      j["max_direction_residual"] = round_sig(r.max_direction_residual);
      j["min_margin"] = round_sig(r.min_margin);
      ctx.emit(j, [&](std::ostream& os) {
        os << "q-subordinate       " << (r.verdict ? "true" : "false") << "\n"
           << "direction residual  " << fmt(r.max_direction_residual) << "\n"
           << "scalar margin       " << fmt(r.min_margin) << "\n";
      });
      return exit_verdict(r.verdict);
    });
  }

  // ---- covariance ----
  auto* cov = app.add_subcommand("covariance", "conjugation covariance of pi_t");
  {
    auto* check = cov->add_subcommand("check", "residual of the covariance identity");
    auto cm = std::make_shared<std::string>(), cu = std::make_shared<std::string>(),
         cw = std::make_shared<std::string>();
    auto ct = std::make_shared<double>(0.5);
    check->add_option("map", *cm)->required();
    check->add_option("unitary", *cu, "matrix document")->required();
    check->add_option("weight", *cw)->required();
    check->add_option("--t", *ct)->required();
    bind(check, [&ctx, cm, cu, cw, ct] {
      MatrixMap phi = load_map(*cm);
      TestOperatorMatrix b = random_test_matrix(phi.n_in(), ctx.seed);
      double residual =
          conjugation_covariance_check(phi, load_matrix(*cu), load_weight(*cw), *ct, b, ctx.tol);
      bool ok = residual <= 1e-8;
      Json j;
      j["command"] = "covariance.check";
      j["residual"] = round_sig(residual);
      j["verdict"] = ok;
      ctx.emit(j, [&](std::ostream& os) {
        os << "residual  " << fmt(residual) << "\n"
           << "verdict   " << (ok ? "true" : "false") << "\n";
      });
      return exit_verdict(ok);
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << "\n";
    return kExitYes;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (!handler) {
    err << "usage error: no subcommand selected\n";
    return kExitUsage;
  }
  try {
    ctx.tol.validate();
    return handler();
  } catch (const Error& e) {
    Errc c = e.code();
    bool inconclusive = c == Errc::Inconclusive || c == Errc::SingularResolvent ||
                        c == Errc::NoConvergence || c == Errc::QuadratureDivergent;
    if (ctx.json) {
      Json j;
      j["error"] = errc_name(c);
      j["message"] = e.what();
      out << j.dump(2) << "\n";
    }
    err << "error: " << e.what() << "\n";
    return inconclusive ? kExitInconclusive : kExitUsage;
  }
}

}  // namespace qcl::cli
