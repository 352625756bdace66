#include "conslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "conslab/convergence.hpp"
#include "conslab/error.hpp"
#include "conslab/frames.hpp"
#include "conslab/operators.hpp"

namespace conslab {

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "wente") return ExperimentKind::wente;
  if (name == "gauge") return ExperimentKind::gauge;
  if (name == "conslaw") return ExperimentKind::conslaw;
  if (name == "frames") return ExperimentKind::frames;
  if (name == "heinz") return ExperimentKind::heinz;
  if (name == "convergence") return ExperimentKind::convergence;
  throw Error("unknown experiment '" + name + "'");
}

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::wente: return "wente";
    case ExperimentKind::gauge: return "gauge";
    case ExperimentKind::conslaw: return "conslaw";
    case ExperimentKind::frames: return "frames";
    case ExperimentKind::heinz: return "heinz";
    case ExperimentKind::convergence: return "convergence";
  }
  return "?";
}

Payload parse_payload(const std::string& name) {
  if (name == "shatah") return Payload::shatah;
  if (name == "conslaw") return Payload::conslaw;
  if (name == "frames") return Payload::frames;
  if (name == "heinz") return Payload::heinz;
  if (name == "harmonic") return Payload::harmonic;
  throw Error("unknown payload '" + name + "'");
}

std::string payload_name(Payload p) {
  switch (p) {
    case Payload::shatah: return "shatah";
    case Payload::conslaw: return "conslaw";
    case Payload::frames: return "frames";
    case Payload::heinz: return "heinz";
    case Payload::harmonic: return "harmonic";
  }
  return "?";
}

bool ExperimentOutcome::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string summarize(const ExperimentOutcome& o) {
  std::ostringstream os;
  for (const auto& c : o.checks)
    os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << " = " << Csv::num(c.value) << (c.upper ? " <= " : " >= ")
       << Csv::num(c.bound) << "\n";
  if (!o.error.empty()) os << "  [FAIL] error: " << o.error << "\n";
  const size_t ok = std::count_if(o.checks.begin(), o.checks.end(), [](const Check& c) { return c.pass; });
  os << o.name << " (" << experiment_name(o.kind) << "): " << (o.pass() ? "PASS" : "FAIL") << " " << ok << "/"
     << o.checks.size() << " checks\n";
  return os.str();
}

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

std::string tag(double lambda, int n) {
  std::ostringstream os;
  os << "[lambda=" << lambda << ",n=" << n << "]";
  return os.str();
}
std::string tag(double lambda) {
  std::ostringstream os;
  os << "[lambda=" << lambda << "]";
  return os.str();
}

void upper(std::vector<Check>& out, std::string name, double v, double bound) {
  out.push_back({std::move(name), v, bound, true, v <= bound});
}
void lower(std::vector<Check>& out, std::string name, double v, double bound) {
  out.push_back({std::move(name), v, bound, false, v >= bound});
}

GeometrySpec geometry(const ExperimentConfig& c, double lambda) {
  GeometrySpec s;
  s.kind = c.geometry;
  s.lambda = lambda;
  s.H = c.H;
  return s;
}

// Slope check plus rows for the slopes table; two points suffice here, the
// convergence experiment insists on three.
void slope_check(std::vector<Check>& checks, Csv& slopes, const std::string& label, const std::vector<int>& ns,
                 const std::vector<double>& h, const std::vector<double>& r, double min_slope) {
  if (h.size() < 2) return;
  const SlopeFit f = fit_slope(h, r, min_slope);
  slopes.row().add(label).add(std::string("fit")).add(ns.front()).add(ns.back()).add(f.slope);
  for (size_t i = 0; i < f.pair_slopes.size(); ++i)
    slopes.row().add(label).add(std::string("pair")).add(ns[i]).add(ns[i + 1]).add(f.pair_slopes[i]);
  lower(checks, "slope " + label, f.slope, min_slope);
}

Csv slopes_table() { return Csv({"residual", "kind", "n_from", "n_to", "slope"}); }

std::vector<double> hs(const std::vector<int>& ns) {
  std::vector<double> h;
  for (int n : ns) h.push_back(2.0 / (n - 1));
  return h;
}

// Control that must not vanish: the finest value keeps half of the coarsest
// and stays ten times above the true residual.
void control_check(std::vector<Check>& checks, const std::string& label, const std::vector<double>& control,
                   const std::vector<double>& truth) {
  if (control.size() < 2) return;
  lower(checks, "control persists " + label, control.back(), 0.5 * control.front());
  lower(checks, "control separated " + label, control.back(), 10.0 * truth.back());
}

// ---------------------------------------------------------------- wente

void run_wente(const ExperimentConfig& c, ExperimentOutcome& o) {
  WenteSweepSpec s;
  s.family = c.family;
  s.samples = c.samples;
  s.n_list = c.n_list;
  s.seed = c.seed;
  s.bc = c.bc;
  s.domain = c.domain;
  s.jobs = c.jobs;
  const auto rows = wente_sweep(s);
  Csv t({"sample_id", "n", "h", "family", "bc", "norm_grad_a", "norm_grad_b", "sup_phi", "norm_grad_phi", "hess_l1",
         "ratio_sup", "ratio_grad", "defined"});
  double max_sup = 0.0, max_grad = 0.0;
  for (const auto& r : rows) {
    const auto& w = r.report;
    t.row().add(r.sample_id).add(r.n).add(r.h).add(family_name(c.family)).add(bc_name(w.bc));
    t.add(w.norm_grad_a).add(w.norm_grad_b).add(w.sup_phi).add(w.norm_grad_phi).add(w.hess_l1);
    t.add(w.ratio_sup).add(w.ratio_grad).add(w.defined ? 1 : 0);
    max_sup = std::max(max_sup, w.ratio_sup);
    max_grad = std::max(max_grad, w.ratio_grad);
  }
  lower(o.checks, "rows", static_cast<double>(rows.size()), static_cast<double>(c.samples * c.n_list.size()));
  // The constants are stated for the Dirichlet problem.
  if (c.bc == BC::dirichlet) {
    upper(o.checks, "max ratio_sup", max_sup, (1.0 + c.slack) / kTwoPi);
    upper(o.checks, "max ratio_grad", max_grad, (1.0 + c.slack) / std::sqrt(kTwoPi));
  }
  o.tables.emplace_back(c.stem() + ".csv", std::move(t));
}

// ---------------------------------------------------------------- gauge

void run_gauge(const ExperimentConfig& c, ExperimentOutcome& o) {
  Csv t({"lambda", "n", "h", "omega_norm", "energy_in", "energy_out", "residual_rel", "div_norm", "sym_defect",
         "grad_P", "grad_xi", "ratio", "descent_iters", "polish_iters", "verified"});
  double max_ratio = 0.0;
  for (double lambda : c.lambdas)
    for (int n : c.n_list) {
      const auto g = make_grid(n);
      const GeometrySpec spec = geometry(c, lambda);
      const Connection O = geometry_omega(geometry_map(g, spec), spec);
      GaugeResult r;
      bool converged = true;
      try {
        r = coulomb_gauge(O, c.gauge);
      } catch (const GaugeError& e) {
        r = e.best;
        converged = false;
      }
      const GaugeVerification v = verify_gauge(r);
      t.row().add(lambda).add(n).add(g->h).add(r.omega_norm).add(r.energy_in).add(r.energy_out).add(r.residual_rel);
      t.add(r.div_norm).add(r.sym_defect).add(r.grad_P).add(r.grad_xi).add(r.ratio);
      t.add(r.descent_iters).add(r.polish_iters).add(v.all() ? 1 : 0);
      const std::string at = tag(lambda, n);
      lower(o.checks, "converged " + at, converged ? 1.0 : 0.0, 1.0);
      lower(o.checks, "verified " + at, v.all() ? 1.0 : 0.0, 1.0);
      upper(o.checks, "residual_rel " + at, r.residual_rel, c.gauge_tol);
      if (r.ratio_defined) max_ratio = std::max(max_ratio, r.ratio);
    }
  upper(o.checks, "max ratio", max_ratio, c.ratio_max);
  o.tables.emplace_back(c.stem() + ".csv", std::move(t));
}

// ---------------------------------------------------------------- conslaw

struct ConsPoint {
  double omega_norm = 0.0, relation_rel = 0.0, cons = 0.0, control = 0.0, shatah = 0.0, stream = 0.0;
  double hodge_rem = 0.0, reconstruction = 0.0;
  ABResult ab;
  bool geometric = true;
};

ConsPoint conslaw_point(const ExperimentConfig& c, double lambda, int n) {
  const auto g = make_grid(n);
  const GeometrySpec spec = geometry(c, lambda);
  const MapField u = geometry_map(g, spec);
  const Connection O = geometry_omega(u, spec);
  const Poisson P(g);
  ConsPoint pt;
  const GaugeResult gr = coulomb_gauge(O, c.gauge);
  pt.ab = build_AB(O, gr, c.ab);
  pt.omega_norm = l2_norm(O, Region::interior);
  if (pt.omega_norm > 0.0) pt.relation_rel = gauge_relation_residual(pt.ab.A, pt.ab.B, O) / pt.omega_norm;
  pt.cons = conservation_residual(P, u, pt.ab.A, pt.ab.B).hminus1;
  pt.control = conservation_residual(P, u, pt.ab.A, MatField::general(g, 2.0 * pt.ab.B.data())).hminus1;
  if (c.geometry == GeometryKind::sphere_harmonic) {
    pt.shatah = shatah_residual(P, u).hminus1;
    pt.stream = conservation_residual(P, u, MatField::identity(g, u.m()), stream_potential(Hodge(g), O)).hminus1;
  }
  const RegularityReport reg = regularity_demo(u, pt.ab.A, pt.ab.B);
  pt.hodge_rem = reg.rem_rel;
  pt.reconstruction = reg.reconstruction_rel;
  for (size_t k = 1; k < pt.ab.trace.size(); ++k)
    if (!(pt.ab.trace[k] < pt.ab.trace[k - 1])) pt.geometric = false;
  return pt;
}

void run_conslaw(const ExperimentConfig& c, ExperimentOutcome& o) {
  Csv t({"lambda", "n", "h", "omega_norm", "fp_iters", "fp_residual_rel", "mean_defect", "relation_rel", "cons_hminus1",
         "control_hminus1", "shatah_hminus1", "stream_hminus1", "hodge_rem_rel", "reconstruction_rel", "grad_A",
         "grad_B", "ratio", "dist_SO", "min_singular"});
  Csv s = slopes_table();
  const bool sphere = c.geometry == GeometryKind::sphere_harmonic;
  for (double lambda : c.lambdas) {
    std::vector<double> relation, cons, control, shatah;
    for (int n : c.n_list) {
      const ConsPoint p = conslaw_point(c, lambda, n);
      const ABResult& ab = p.ab;
      t.row().add(lambda).add(n).add(2.0 / (n - 1)).add(p.omega_norm).add(ab.fp_iters).add(ab.fp_residual_rel);
      t.add(ab.mean_defect).add(p.relation_rel).add(p.cons).add(p.control).add(p.shatah).add(p.stream);
      t.add(p.hodge_rem).add(p.reconstruction).add(ab.grad_A).add(ab.grad_B).add(ab.ratio).add(ab.dist_SO);
      t.add(ab.min_singular);
      const std::string at = tag(lambda, n);
      lower(o.checks, "geometric trace " + at, p.geometric ? 1.0 : 0.0, 1.0);
      upper(o.checks, "final update " + at, ab.trace.empty() ? 0.0 : ab.trace.back(), c.ab.tol_fp);
      upper(o.checks, "mean defect " + at, ab.mean_defect, c.exact_tol);
      if (n >= 65) upper(o.checks, "relation_rel " + at, p.relation_rel, c.gauge_tol);
      upper(o.checks, "hodge remainder " + at, p.hodge_rem, c.hodge_tol);
      if (ab.ratio_defined) upper(o.checks, "ratio " + at, ab.ratio, c.ratio_max);
      relation.push_back(p.relation_rel);
      cons.push_back(p.cons);
      control.push_back(p.control);
      shatah.push_back(p.shatah);
    }
    const std::string at = tag(lambda);
    for (size_t k = 1; k < relation.size(); ++k)
      upper(o.checks, "relation decreasing " + at + " n=" + std::to_string(c.n_list[k]), relation[k], relation[k - 1]);
    const auto h = hs(c.n_list);
    slope_check(o.checks, s, "cons_hminus1" + at, c.n_list, h, cons, c.min_slope);
    if (sphere) slope_check(o.checks, s, "shatah_hminus1" + at, c.n_list, h, shatah, c.min_slope);
    control_check(o.checks, at, control, cons);
  }
  o.tables.emplace_back(c.stem() + ".csv", std::move(t));
  if (s.rows()) o.tables.emplace_back(c.stem() + "_slopes.csv", std::move(s));
}

// ---------------------------------------------------------------- frames

struct FramePoint {
  Frame f;
  FrameCheck check;
  double idempotence = 0.0;
  ABound bound;
  FrameResidual r, control;
  SecondDerivativeReport sd;
};

FramePoint frames_point(double lambda, int n) {
  const auto g = make_grid(n);
  const MapField u = stereo_sphere_map(g, lambda);
  const Hodge H(g);
  const Poisson P(g);
  FramePoint pt;
  pt.f = coulomb_frame(H, u);
  pt.check = check_frame(u, pt.f);
  pt.idempotence = coulomb_frame_from(H, pt.f).max_angle;
  const ScalarField a = solve_a(P, pt.f);
  pt.bound = a_bounds(a, pt.f);
  pt.r = frame_conservation_residual(P, u, pt.f, a);
  pt.control = frame_conservation_residual(P, u, pt.f, ScalarField(g, 2.0 * a.v));
  pt.sd = second_derivative_report(u, pt.f);
  return pt;
}

void run_frames(const ExperimentConfig& c, ExperimentOutcome& o) {
  Csv t({"lambda", "n", "h", "axis", "iterations", "coulomb_residual", "coulomb_tol", "orthonormality", "tangency",
         "idempotence_angle", "sup_a", "grad_a", "grad_e1", "grad_e2", "ratio_sup", "ratio_grad", "r1", "r2",
         "control_r1", "control_r2", "lhs", "bracket", "C"});
  Csv s = slopes_table();
  std::vector<double> finest_C;
  const auto h = hs(c.n_list);
  for (double lambda : c.lambdas) {
    std::vector<double> r1, r2, c1, c2, Cs;
    for (int n : c.n_list) {
      const FramePoint p = frames_point(lambda, n);
      const double denom = p.bound.grad_e1 * p.bound.grad_e2;
      t.row().add(lambda).add(n).add(2.0 / (n - 1)).add(p.f.axis).add(p.f.iterations).add(p.f.coulomb_residual);
      t.add(p.f.tol).add(p.check.orthonormality).add(p.check.tangency).add(p.idempotence);
      t.add(p.bound.sup_a).add(p.bound.grad_a).add(p.bound.grad_e1).add(p.bound.grad_e2);
      t.add(p.bound.ratio_sup).add(p.bound.ratio_grad).add(p.r.r1).add(p.r.r2).add(p.control.r1).add(p.control.r2);
      t.add(p.sd.lhs).add(p.sd.bracket).add(p.sd.C);
      const std::string at = tag(lambda, n);
      upper(o.checks, "orthonormality " + at, p.check.orthonormality, 1e-10);
      upper(o.checks, "tangency " + at, p.check.tangency, 1e-8);
      upper(o.checks, "coulomb residual " + at, p.f.coulomb_residual, p.f.tol);
      upper(o.checks, "idempotence angle " + at, p.idempotence, 1e-6);
      upper(o.checks, "sup a " + at, p.bound.sup_a, (1.0 + c.slack) / kTwoPi * denom);
      upper(o.checks, "grad a " + at, p.bound.grad_a, (1.0 + c.slack) / std::sqrt(kTwoPi) * denom);
      r1.push_back(p.r.r1);
      r2.push_back(p.r.r2);
      c1.push_back(p.control.r1);
      c2.push_back(p.control.r2);
      Cs.push_back(p.sd.C);
    }
    const std::string at = tag(lambda);
    slope_check(o.checks, s, "r1" + at, c.n_list, h, r1, c.min_slope);
    slope_check(o.checks, s, "r2" + at, c.n_list, h, r2, c.min_slope);
    control_check(o.checks, "r1" + at, c1, r1);
    control_check(o.checks, "r2" + at, c2, r2);
    if (Cs.size() > 1) {
      const auto [lo, hi] = std::minmax_element(Cs.begin(), Cs.end());
      upper(o.checks, "C drift over n " + at, (*hi - *lo) / Cs.back(), c.c_refine);
    }
    finest_C.push_back(Cs.back());
  }
  if (finest_C.size() > 1) {
    const auto [lo, hi] = std::minmax_element(finest_C.begin(), finest_C.end());
    upper(o.checks, "C spread over lambda", *lo > 0.0 ? *hi / *lo : INFINITY, c.c_spread);
  }
  o.tables.emplace_back(c.stem() + ".csv", std::move(t));
  if (s.rows()) o.tables.emplace_back(c.stem() + "_slopes.csv", std::move(s));
}

// ---------------------------------------------------------------- heinz

struct HeinzPoint {
  double antisym = 0.0, apply_defect = 0.0, general_defect = 0.0, cmc_l2 = 0.0;
  PdeResidual pde;
};

HeinzPoint heinz_point(double H, double lambda, int n) {
  const auto g = make_grid(n);
  const MapField u = cmc_cap_map(g, H, lambda);
  const auto Hfn = [H](const Eigen::Vector3d&) { return H; };
  const Connection O = omega_mean_curvature(u, Hfn);
  HeinzPoint pt;
  const int m = O.m();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      pt.antisym = std::max(pt.antisym, (O.X().row(i * m + j) + O.X().row(j * m + i)).cwiseAbs().maxCoeff());
      pt.antisym = std::max(pt.antisym, (O.Y().row(i * m + j) + O.Y().row(j * m + i)).cwiseAbs().maxCoeff());
    }
  const Eigen::MatrixXd rhs = wedge_rhs(u, Hfn);
  const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  pt.apply_defect = (connection_apply(O, u).u - rhs).cwiseAbs().maxCoeff() / scale;
  const Connection G = omega_general(u, {}, [H](const Eigen::VectorXd&) { return constant_h_torsion(H); });
  pt.general_defect = std::max((G.X() - O.X()).cwiseAbs().maxCoeff(), (G.Y() - O.Y()).cwiseAbs().maxCoeff()) /
                      std::max(O.X().cwiseAbs().maxCoeff(), O.Y().cwiseAbs().maxCoeff());
  pt.cmc_l2 = l2_rows(*g, cmc_rows(u, H), Region::interior);
  pt.pde = residual_pde(u, O);
  return pt;
}

void run_heinz(const ExperimentConfig& c, ExperimentOutcome& o) {
  Csv t({"H", "lambda", "n", "h", "antisym_defect", "apply_defect_rel", "general_defect_rel", "cmc_l2", "pde_l2",
         "pde_hminus1"});
  Csv s = slopes_table();
  const auto h = hs(c.n_list);
  for (double lambda : c.lambdas) {
    std::vector<double> res;
    for (int n : c.n_list) {
      const HeinzPoint p = heinz_point(c.H, lambda, n);
      t.row().add(c.H).add(lambda).add(n).add(2.0 / (n - 1)).add(p.antisym).add(p.apply_defect);
      t.add(p.general_defect).add(p.cmc_l2).add(p.pde.l2).add(p.pde.hminus1);
      const std::string at = tag(lambda, n);
      upper(o.checks, "antisymmetry " + at, p.antisym, 0.0);
      upper(o.checks, "wedge reproduction " + at, p.apply_defect, c.exact_tol);
      upper(o.checks, "general form " + at, p.general_defect, c.exact_tol);
      res.push_back(p.cmc_l2);
    }
    slope_check(o.checks, s, "cmc_l2" + tag(lambda), c.n_list, h, res, c.min_slope);
  }
  o.tables.emplace_back(c.stem() + ".csv", std::move(t));
  if (s.rows()) o.tables.emplace_back(c.stem() + "_slopes.csv", std::move(s));
}

// ---------------------------------------------------------------- convergence

void run_convergence(const ExperimentConfig& c, ExperimentOutcome& o) {
  if (c.n_list.size() < 3) throw Error("convergence needs at least 3 grid sizes");
  Csv t({"lambda", "residual", "n", "h", "value"});
  Csv s = slopes_table();
  const auto h = hs(c.n_list);
  for (double lambda : c.lambdas) {
    std::vector<std::pair<std::string, std::vector<double>>> tracked;
    auto track = [&](const std::string& name, double v) {
      auto it = std::find_if(tracked.begin(), tracked.end(), [&](const auto& p) { return p.first == name; });
      if (it == tracked.end()) tracked.push_back({name, {v}});
      else it->second.push_back(v);
    };
    for (int n : c.n_list) {
      switch (c.payload) {
        case Payload::shatah: {
          const auto g = make_grid(n);
          track("shatah_hminus1", shatah_residual(Poisson(g), stereo_sphere_map(g, lambda)).hminus1);
          break;
        }
        case Payload::conslaw: track("cons_hminus1", conslaw_point(c, lambda, n).cons); break;
        case Payload::frames: {
          const FramePoint p = frames_point(lambda, n);
          track("r1", p.r.r1);
          track("r2", p.r.r2);
          break;
        }
        case Payload::heinz: track("cmc_l2", heinz_point(c.H, lambda, n).cmc_l2); break;
        case Payload::harmonic: {
          const auto g = make_grid(n);
          const GeometrySpec spec = geometry(c, lambda);
          const MapField u = geometry_map(g, spec);
          track("pde_hminus1", residual_pde(u, geometry_omega(u, spec)).hminus1);
          break;
        }
      }
    }
    for (const auto& [name, vals] : tracked) {
      for (size_t k = 0; k < vals.size(); ++k) t.row().add(lambda).add(name).add(c.n_list[k]).add(h[k]).add(vals[k]);
      const std::string label = name + tag(lambda);
      const SlopeFit f = fit_slope(h, vals, c.min_slope, 3);
      s.row().add(label).add(std::string("fit")).add(c.n_list.front()).add(c.n_list.back()).add(f.slope);
      for (size_t i = 0; i < f.pair_slopes.size(); ++i)
        s.row().add(label).add(std::string("pair")).add(c.n_list[i]).add(c.n_list[i + 1]).add(f.pair_slopes[i]);
      lower(o.checks, "slope " + label, f.slope, c.min_slope);
    }
  }
  o.tables.emplace_back(c.stem() + ".csv", std::move(t));
  o.tables.emplace_back(c.stem() + "_slopes.csv", std::move(s));
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  ExperimentOutcome o;
  o.name = cfg.stem();
  o.kind = cfg.kind;
  try {
    switch (cfg.kind) {
      case ExperimentKind::wente: run_wente(cfg, o); break;
      case ExperimentKind::gauge: run_gauge(cfg, o); break;
      case ExperimentKind::conslaw: run_conslaw(cfg, o); break;
      case ExperimentKind::frames: run_frames(cfg, o); break;
      case ExperimentKind::heinz: run_heinz(cfg, o); break;
      case ExperimentKind::convergence: run_convergence(cfg, o); break;
    }
  } catch (const std::exception& e) {
    o.error = e.what();
    o.tables.clear();
    return o;
  }
  if (!out_dir.empty())
    for (const auto& [file, table] : o.tables) {
      table.write(out_dir / file);
      o.files.push_back(out_dir / file);
    }
  return o;
}

}  // namespace conslab
