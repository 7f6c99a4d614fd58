// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero on any failure.

#include "diraclab/report.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

using namespace diraclab;

namespace {

int g_failures = 0;

class Criterion {
 public:
  explicit Criterion(std::string label) : label_(std::move(label)) {
    start_ = std::chrono::steady_clock::now();
  }

  void require(bool ok, const std::string& what) {
    if (!ok) {
      failures_.push_back(what);
    }
  }

  void note(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %s=%.3g", key.c_str(), value);
    notes_ += buf;
  }

  void finish() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    if (failures_.empty()) {
      std::printf("[PASS] %-12s (%.1fs)%s\n", label_.c_str(), secs,
                  notes_.c_str());
    } else {
      ++g_failures;
      std::printf("[FAIL] %-12s (%.1fs)%s\n", label_.c_str(), secs,
                  notes_.c_str());
      for (const std::string& f : failures_) {
        std::printf("       - %s\n", f.c_str());
      }
    }
    std::fflush(stdout);
  }

 private:
  std::string label_;
  std::string notes_;
  std::vector<std::string> failures_;
  std::chrono::steady_clock::time_point start_;
};

Multivector random_mv(int n, Rng& rng) {
  Multivector f(n);
  for (int a = 0; a < f.size(); ++a) f.coeffs()[a] = rng.normal();
  return f;
}

// ---------------------------------------------------------------------------
// 1. Clifford algebra suite
// ---------------------------------------------------------------------------
void criterion_clifford() {
  Criterion c("1 clifford");
  double max_rel = 0.0;
  bool bound_ok = true;
  Rng rng(2024);
  for (int n = 2; n <= 8; ++n) {
    // generator relations, exact
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Multivector ej = Multivector::basis(n, 1u << j);
        const Multivector ek = Multivector::basis(n, 1u << k);
        Multivector anti = gmul(ej, ek) + gmul(ek, ej);
        if (j == k) anti[0] += 2.0;
        c.require(anti.norm() == 0.0, "generator relation violated");
      }
    }
    // conjugation anti-automorphism, exact on basis blades
    for (int a = 0; a < (1 << n); ++a) {
      const Multivector ea = Multivector::basis(n, static_cast<BladeIndex>(a));
      const Multivector lhs = conj(gmul(ea, ea));
      const Multivector rhs = gmul(conj(ea), conj(ea));
      c.require((lhs - rhs).norm() == 0.0, "conjugation on blades");
    }
    const double cap = std::pow(2.0, n);
    for (int rep = 0; rep < 10000; ++rep) {
      const Multivector f = random_mv(n, rng);
      const Multivector g = random_mv(n, rng);
      const Multivector h = random_mv(n, rng);
      const double scale = f.norm() * g.norm() * h.norm();

      const Multivector fg = gmul(f, g);
      // Lemma bound
      if (fg.squared_norm() >
          cap * f.squared_norm() * g.squared_norm() * (1.0 + 1e-12)) {
        bound_ok = false;
      }
      // associativity
      const double assoc =
          (gmul(fg, h) - gmul(f, gmul(g, h))).norm() / (scale * cap);
      max_rel = std::max(max_rel, assoc);
      // Re cyclicity
      max_rel = std::max(max_rel,
                         re_cyclic_residual(f, g) / (f.norm() * g.norm()));
      // conjugation anti-automorphism on random elements
      const double conj_rel =
          (conj(fg) - gmul(conj(g), conj(f))).norm() / (f.norm() * g.norm() * cap);
      max_rel = std::max(max_rel, conj_rel);
      // paravector multiplicativity
      Multivector p(n);
      p[0] = rng.normal();
      for (int j = 0; j < n; ++j) p[1u << j] = rng.normal();
      const double expected = p.norm() * g.norm();
      max_rel = std::max(max_rel,
                         std::abs(gmul(p, g).norm() - expected) / expected);
      max_rel = std::max(max_rel,
                         std::abs(gmul(g, p).norm() - expected) / expected);
    }
  }
  c.require(max_rel <= 1e-12, "relative residual " + std::to_string(max_rel));
  c.require(bound_ok, "norm bound |fg|^2 <= 2^n |f|^2 |g|^2 violated");
  c.note("max_rel", max_rel);
  c.finish();
}

// ---------------------------------------------------------------------------
// 2 + 3. Identity suite and coercivity margins
// ---------------------------------------------------------------------------
struct SuiteSpec {
  IdentityKind kind;
  int n;
  Weight weight;
  Domain domain;
  TrialParams params;
};

void criterion_identities_and_margins() {
  Criterion c2("2 identities");
  Criterion c3("3 margins");
  const int trials = 50;
  const double tol = 1e-6;

  std::vector<SuiteSpec> specs;
  auto annulus = [](int n) { return Domain::annulus(n, 1.0, 2.0); };
  auto exterior_annulus = [](int n) { return Domain::annulus(n, 1.2, 3.0); };
  auto box = [](int n) {
    return Domain::box(Vec::Constant(n, -1.5), Vec::Constant(n, 1.5));
  };
  for (int n : {2, 3, 4}) {
    const Weight gauss = Weight::radial_power(n, 2.0);
    specs.push_back({IdentityKind::adjoint, n, gauss, annulus(n), {}});
    specs.push_back({IdentityKind::bochner, n, gauss, annulus(n), {}});
    specs.push_back({IdentityKind::weighted, n, gauss, annulus(n), {}});
    specs.push_back({IdentityKind::general, n, gauss, annulus(n), {}});
    specs.push_back({IdentityKind::radial, n, gauss, annulus(n), {}});
    specs.push_back(
        {IdentityKind::quadratic, n, Weight::single_quadratic(n), box(n), {}});
    Vec a = Vec::Ones(n);
    a[0] = 1.01;
    a[1] = 0.99;
    specs.push_back({IdentityKind::perturbed, n, Weight::aniso_quadratic(a),
                     exterior_annulus(n), {}});
    specs.push_back({IdentityKind::subharmonic, n, gauss, annulus(n), {}});
  }
  specs.push_back({IdentityKind::apriori2d, 2, Weight::radial_power(2, 2.0),
                   annulus(2), {}});
  specs.push_back({IdentityKind::radial, 3, Weight::radial_power(3, -1.0),
                   annulus(3), {}});

  double worst_rel = 0.0;
  double worst_margin_gap = 0.0;  // most negative margin + floor
  for (const SuiteSpec& spec : specs) {
    QuadratureSpec q;
    if (spec.n >= 4) {
      q.radial_nodes = 36;
      q.sphere_level = 14;
      q.box_nodes = 24;
    }
    const std::vector<IdentityReport> reports = run_identity_trials(
        spec.kind, spec.weight, spec.domain, q, trials, 99, spec.params);
    for (const IdentityReport& r : reports) {
      if (spec.kind != IdentityKind::perturbed) {
        worst_rel = std::max(worst_rel, r.rel_residual);
        if (r.rel_residual > tol) {
          c2.require(false, std::string(identity_kind_name(spec.kind)) +
                                " n=" + std::to_string(spec.n) + " " + r.name +
                                " rel=" + std::to_string(r.rel_residual));
        }
      }
      const double floor = margin_floor(r);
      for (const auto& [name, value] : r.margins) {
        worst_margin_gap = std::min(worst_margin_gap, value + floor);
        if (value < -floor) {
          c3.require(false, std::string(identity_kind_name(spec.kind)) +
                                " n=" + std::to_string(spec.n) + " margin " +
                                name + " = " + std::to_string(value));
        }
      }
    }
  }

  // kappa-k consistency at 1e-12 over random parameters
  Rng rng(31);
  double worst_kk = 0.0;
  for (int n : {2, 3, 4}) {
    for (int rep = 0; rep < 100; ++rep) {
      const double kappa =
          static_cast<double>(n - 2) / n + rng.uniform(1e-3, 10.0);
      worst_kk =
          std::max(worst_kk, KappaK::from_kappa(n, kappa).relation_residual(n));
    }
  }
  c2.require(worst_kk <= 1e-12, "kappa-k relation residual");
  c2.note("max_rel", worst_rel);
  c2.finish();
  c3.note("min_margin_slack", worst_margin_gap);
  c3.finish();
}

// ---------------------------------------------------------------------------
// 4. Obstruction reproduction
// ---------------------------------------------------------------------------
void criterion_obstruction() {
  Criterion c("4 obstruction");
  for (int n : {3, 4, 5}) {
    for (int m : {1, 3, 10}) {
      const ObstructionResult exact = counterexample_norms(n, m);
      const double expected = static_cast<double>(m) * m * n * (n - 2);
      c.require(std::abs(exact.ratio - expected) <= 1e-12 * expected,
                "exact ratio n=" + std::to_string(n));
      const ObstructionResult quad =
          counterexample_quadrature_crosscheck(n, m, 1e-9, 7);
      c.require(quad.rel_err_u <= 1e-7,
                "u-norm quadrature n=" + std::to_string(n) +
                    " m=" + std::to_string(m) +
                    " rel=" + std::to_string(quad.rel_err_u));
      c.require(quad.rel_err_f <= 1e-7,
                "f-integral quadrature n=" + std::to_string(n) +
                    " m=" + std::to_string(m));
      c.require(quad.pointwise_dirac_residual <= 1e-8,
                "pointwise Du_m = f_m");
    }
  }
  c.require(counterexample_norms(3, 10).ratio == 300.0, "n=3 m=10 ratio 300");

  // orthogonality pairings and spherical means
  for (int n : {3, 4}) {
    for (int degree : {0, 1}) {
      const OuterMonogenic h = make_outer_monogenic(
          gen_monogenic_poly(n, degree, 500 + static_cast<std::uint64_t>(degree)));
      for (int m : {1, 7}) {
        const double pairing = orthogonality_pairing(n, m, h);
        c.require(pairing <= 1e-7,
                  "orthogonality n=" + std::to_string(n) + " deg=" +
                      std::to_string(degree) + " = " + std::to_string(pairing));
      }
      const SphereRule rule = sphere_rule(n, 12);
      double sup = 0.0;
      Vec x(n);
      for (int i = 0; i < rule.weights.size(); ++i) {
        x = 2.0 * rule.nodes.row(i);
        sup = std::max(sup, h.field(x).norm());
      }
      c.require(spherical_mean(h.field, 2.0) <= 1e-8 * sup * sphere_area(n),
                "spherical mean of outer monogenic");
    }
  }
  c.finish();
}

// ---------------------------------------------------------------------------
// 5. Sharpness of the Gaussian constant
// ---------------------------------------------------------------------------
void criterion_sharpness() {
  Criterion c("5 sharpness");
  const SharpnessResult s = sharpness_sequence(3, {4, 16, 64});
  c.require(std::abs(s.norm_x_sq_quad / s.norm_x_sq_closed - 1.0) <= 1e-6,
            "||x||^2 closed form");
  c.require(std::abs(s.norm_u0_sq_quad / s.norm_u0_sq_closed - 1.0) <= 1e-6,
            "||u0||^2 = 4 ||x||^2");
  for (std::size_t i = 0; i + 1 < s.ratios.size(); ++i) {
    c.require(s.ratios[i + 1] >= s.ratios[i] - 1e-9,
              "ratios nondecreasing in m");
  }
  c.require(s.ratios.back() >= 0.24, "final ratio >= 0.24");
  c.note("ratio_m64", s.ratios.back());
  c.finish();
}

// ---------------------------------------------------------------------------
// 6. Kelvin identity
// ---------------------------------------------------------------------------
void criterion_kelvin() {
  Criterion c("6 kelvin");
  Rng rng(55);
  double worst = 0.0;
  for (int n : {3, 4}) {
    Rng coeff_rng(600 + static_cast<std::uint64_t>(n));
    const PolyMV poly = PolyMV::random(n, 2, coeff_rng);
    const CliffordField g = poly.as_field();
    const CliffordField kg = kelvin(g);
    for (int rep = 0; rep < 50; ++rep) {
      Vec dir(n);
      for (int j = 0; j < n; ++j) dir[j] = rng.normal();
      dir.normalize();
      const Vec x = rng.uniform(1.0, 3.0) * dir;
      const double r = x.norm();
      Multivector rhs = gmul(Multivector::vector(x),
                             dirac(g, Vec(x / (r * r))));
      rhs *= -std::pow(r, -(n + 2.0));
      const double resid =
          (dirac(kg, x) - rhs).norm() / std::max(1.0, rhs.norm());
      worst = std::max(worst, resid);
    }
    // monogenic input: D(K g) = 0
    const MonogenicPolynomial mono = gen_monogenic_poly(n, 1, 61);
    const CliffordField km = kelvin(mono.as_field());
    for (int rep = 0; rep < 20; ++rep) {
      Vec dir(n);
      for (int j = 0; j < n; ++j) dir[j] = rng.normal();
      dir.normalize();
      const Vec x = rng.uniform(1.0, 3.0) * dir;
      c.require(dirac(km, x).norm() <= 1e-8,
                "Kelvin of a monogenic stays monogenic");
    }
  }
  c.require(worst <= 1e-6, "Kelvin-Dirac identity residual");
  c.note("max_resid", worst);
  c.finish();
}

// ---------------------------------------------------------------------------
// 7. Discrete solver trends
// ---------------------------------------------------------------------------
struct TrendResult {
  std::vector<double> ratios;
  bool residuals_ok = true;
};

TrendResult solve_trend(int n, const std::vector<int>& levels, bool poisson) {
  TrendResult out;
  const Weight w = Weight::radial_power(n, 2.0);
  Vec center = Vec::Zero(n);
  center[0] = 1.5;
  const CliffordField g = random_bump_field(center, 0.42, 2, 4242);
  for (int cells : levels) {
    const Grid grid = Grid::annulus_shell(n, 1.0, 2.0, cells);
    const DiscreteDirac op = discretize_dirac(grid, w);
    const Eigen::VectorXd f = op.a * sample_field(grid, g);
    if (poisson) {
      const auto [u, rep] = poisson_solve(op, f, 1.0 / 16.0);
      out.ratios.push_back(rep.norm_ratio);
      // the first leg is consistent data; the second stops at the
      // least-squares plateau for the composed data
      out.residuals_ok = out.residuals_ok && rep.first.consistent &&
                         rep.first.residual <= 1e-8 && rep.second.converged;
    } else {
      const auto [u, rep] = minimal_norm_solve(op, f, 0.25);
      out.ratios.push_back(rep.norm_ratio);
      out.residuals_ok = out.residuals_ok && rep.consistent &&
                         rep.residual <= 1e-8;
    }
  }
  return out;
}

void check_trend(Criterion& c, const std::string& label,
                 const TrendResult& t, double bound) {
  c.require(t.residuals_ok, label + ": constraint residual target met");
  for (std::size_t i = 0; i + 1 < t.ratios.size(); ++i) {
    const double ex0 = std::max(0.0, t.ratios[i] / bound - 1.0);
    const double ex1 = std::max(0.0, t.ratios[i + 1] / bound - 1.0);
    c.require(ex1 <= ex0 && !(ex0 > 0.0 && ex1 >= ex0),
              label + ": excess over the bound decreases under refinement");
  }
  c.require(t.ratios.back() <= bound,
            label + ": bound met at the finest level (ratio " +
                std::to_string(t.ratios.back()) + ")");
}

void criterion_solver() {
  Criterion c("7 solver");
  // direct solve trends
  const TrendResult d2 = solve_trend(2, {16, 32, 64}, false);
  check_trend(c, "n=2 dirac", d2, 0.25);
  const TrendResult d3 = solve_trend(3, {8, 16, 32}, false);
  check_trend(c, "n=3 dirac", d3, 0.25);
  // Poisson composition trend (coarse levels overshoot the discrete range;
  // the excess must shrink under refinement and vanish at the finest level)
  const TrendResult p2 = solve_trend(2, {24, 48, 96}, true);
  check_trend(c, "n=2 poisson", p2, 1.0 / 16.0);

  // discrete operator order >= 1.9 under h-halving, measured on a globally
  // analytic field in the interior rms norm
  for (int n : {2, 3}) {
    const CliffordField probe = smooth_probe_field(n, 2024);
    std::vector<double> errs;
    for (int cells : (n == 2 ? std::vector<int>{32, 64, 128}
                             : std::vector<int>{16, 32, 64})) {
      const Grid grid = Grid::annulus_shell(n, 1.0, 2.0, cells);
      const DiscreteDirac op =
          discretize_dirac(grid, Weight::radial_power(n, 2.0));
      // width-1 interior: exactly the cells with central rows of A
      errs.push_back(dirac_consistency_rms(op, probe, 1));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      const double order = std::log2(errs[i] / errs[i + 1]);
      c.require(order >= 1.9, "discrete Dirac order n=" + std::to_string(n) +
                                  " = " + std::to_string(order));
    }
  }
  c.note("n2_ratio", d2.ratios.back());
  c.note("n3_ratio", d3.ratios.back());
  c.note("poisson_ratio", p2.ratios.back());
  c.finish();
}

// ---------------------------------------------------------------------------
// 8. Determinism
// ---------------------------------------------------------------------------
ReportFile small_report() {
  ReportFile report;
  report.config.command = "verify";
  report.config.identity = "bochner";
  report.config.trials = 3;
  const Domain dom = Domain::annulus(3, 1.0, 2.0);
  const Weight w = Weight::radial_power(3, 2.0);
  const auto trials = run_identity_trials(IdentityKind::bochner, w, dom,
                                          QuadratureSpec{}, 3, 12345);
  for (const IdentityReport& r : trials) {
    report.entries.push_back(make_entry("identity", r.name, r.rel_residual,
                                        "<=", 1e-6,
                                        identity_report_to_json(r)));
  }
  const ObstructionResult obs = counterexample_quadrature_crosscheck(3, 1, 1e-9);
  report.entries.push_back(make_entry(
      "obstruction", "n3m1", std::max(obs.rel_err_u, obs.rel_err_f), "<=",
      1e-7, obstruction_result_to_json(obs)));
  const Grid grid = Grid::annulus_shell(2, 1.0, 2.0, 16);
  const DiscreteDirac op = discretize_dirac(grid, Weight::radial_power(2, 2.0));
  Vec center = Vec::Zero(2);
  center[0] = 1.5;
  const Eigen::VectorXd f =
      op.a * sample_field(grid, random_bump_field(center, 0.42, 2, 777));
  const auto [u, sr] = minimal_norm_solve(op, f, 0.25);
  report.entries.push_back(
      make_entry("solve", "n2", sr.residual, "<=", 1e-8,
                 solve_report_to_json(sr)));
  return report;
}

void criterion_determinism() {
  Criterion c("8 determinism");
  const std::string a = small_report().serialize(false);
  const std::string b = small_report().serialize(false);
  c.require(a == b, "identical config+seed must give bit-identical reports");
  c.require(!a.empty(), "report serialization is nonempty");
  c.finish();
}

}  // namespace

int main() {
  criterion_clifford();
  criterion_identities_and_margins();
  criterion_obstruction();
  criterion_sharpness();
  criterion_kelvin();
  criterion_solver();
  criterion_determinism();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
