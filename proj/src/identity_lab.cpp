#include "diraclab/identity_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diraclab {

namespace {

constexpr double kScaleFloor = 1e-30;
constexpr double kFdProductStep = 1e-5;  // multiplier-product derivatives

void set_vector_mv(Multivector& mv, const Vec& v) {
  mv.set_zero();
  for (int j = 0; j < v.size(); ++j) {
    mv[static_cast<BladeIndex>(1u << j)] = v[j];
  }
}

Domain support_domain(const CliffordField& u, const Domain& dom) {
  if (!u.support()) {
    throw std::invalid_argument(
        "identity checks require a declared compact support ball");
  }
  if (!dom.contains_ball(*u.support())) {
    throw std::invalid_argument("support leaks outside the stated domain");
  }
  return Domain::ball(u.support()->center, u.support()->radius);
}

struct SweepOutput {
  std::vector<double> terms;
  double est_error = 0.0;
  std::int64_t nodes = 0;
};

template <typename NodeFn>
SweepOutput run_sweep(const Domain& ball, const QuadratureSpec& q, int nterms,
                      NodeFn&& fn) {
  auto run_one = [&](const QuadGrid& grid) {
    std::vector<PairwiseAccumulator> acc(static_cast<std::size_t>(nterms));
    Vec x(ball.dim);
    for (std::int64_t i = 0; i < grid.size(); ++i) {
      x = grid.points.row(i);
      fn(x, grid.weights[i], acc);
    }
    std::vector<double> t(static_cast<std::size_t>(nterms));
    for (int k = 0; k < nterms; ++k) {
      t[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].total();
    }
    return t;
  };
  const QuadGrid fine = build_grid(ball, q);
  const QuadGrid coarse = build_grid(ball, q.coarser());
  SweepOutput out;
  out.terms = run_one(fine);
  const std::vector<double> tc = run_one(coarse);
  for (int k = 0; k < nterms; ++k) {
    out.est_error += std::abs(out.terms[static_cast<std::size_t>(k)] -
                              tc[static_cast<std::size_t>(k)]);
  }
  out.nodes = fine.size() + coarse.size();
  return out;
}

void finalize(IdentityReport& r) {
  r.abs_residual = std::abs(r.lhs - r.rhs);
  r.rel_residual =
      r.abs_residual / std::max({std::abs(r.lhs), std::abs(r.rhs), kScaleFloor});
}

// sum_k d_k(Y e_k e_j Y) for j = 1..n by central differences of the
// multivector product; Y evaluated through `yfn`.
struct MultiplierDerivWorkspace {
  explicit MultiplierDerivWorkspace(int n)
      : mj(static_cast<std::size_t>(n), Multivector(n)),
        ek(n),
        vy(n),
        a(n),
        c(n),
        prod(n) {}

  std::vector<Multivector> mj;
  Multivector ek, vy, a, c, prod;
  Vec xs, yp, ym;
};

template <typename YFn>
void multiplier_deriv_terms(const YFn& yfn, const Vec& x, int n,
                            MultiplierDerivWorkspace& ws) {
  const double h = kFdProductStep * std::max(1.0, x.norm());
  for (int j = 0; j < n; ++j) ws.mj[static_cast<std::size_t>(j)].set_zero();
  ws.xs = x;
  for (int k = 1; k <= n; ++k) {
    ws.xs[k - 1] = x[k - 1] + h;
    ws.yp = yfn(ws.xs);
    ws.xs[k - 1] = x[k - 1] - h;
    ws.ym = yfn(ws.xs);
    ws.xs[k - 1] = x[k - 1];
    for (int sgn = 0; sgn < 2; ++sgn) {
      const Vec& y = (sgn == 0) ? ws.yp : ws.ym;
      const double scale = (sgn == 0 ? 0.5 : -0.5) / h;
      ws.ek.set_zero();
      ws.ek[static_cast<BladeIndex>(1u << (k - 1))] = 1.0;
      gmul_vector_into(y, ws.ek, ws.a);  // (Y e_k)
      set_vector_mv(ws.vy, y);
      for (int j = 1; j <= n; ++j) {
        gmul_basis_into(j, ws.vy, ws.c);  // (e_j Y)
        gmul_into(ws.a, ws.c, ws.prod);   // Y e_k e_j Y
        ws.mj[static_cast<std::size_t>(j - 1)].coeffs() +=
            scale * ws.prod.coeffs();
      }
    }
  }
}

}  // namespace

KappaK KappaK::from_kappa(int n, double kappa) {
  const double threshold = static_cast<double>(n - 2) / n;
  if (!(kappa > threshold)) {
    throw std::invalid_argument("kappa must exceed (n-2)/n");
  }
  KappaK kk;
  kk.kappa = kappa;
  kk.k = (n - 2) * kappa / (n * kappa - (n - 2));
  return kk;
}

double KappaK::relation_residual(int n) const {
  const double threshold = static_cast<double>(n - 2) / n;
  return std::abs((k - threshold) * (kappa + k) - k * k);
}

IdentityReport check_adjoint_duality(const CliffordField& u,
                                     const CliffordField& v, const Weight& w,
                                     const Domain& dom,
                                     const QuadratureSpec& q) {
  const Domain ball = support_domain(u, dom);
  support_domain(v, dom);
  const int n = u.dim();

  FieldFrame fu(n), fv(n);
  Multivector du(n), dv(n), dphi_u(n), scratch(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    v.eval_frame(x, fv);
    const double e = std::exp(-w.phi(x));
    dirac_from_frame_into(fu, du, scratch);
    dirac_from_frame_into(fv, dv, scratch);
    gmul_vector_into(w.grad(x), fu.u, dphi_u);
    du -= dphi_u;  // delta_phi u
    acc[0].add(wq * e * inner(du, fv.u));
    acc[1].add(wq * e * inner(fu.u, dv));
  };
  const SweepOutput s = run_sweep(ball, q, 2, node);

  IdentityReport r;
  r.name = "adjoint_duality";
  r.lhs = s.terms[0];
  r.rhs = s.terms[1];
  r.terms = {{"lhs:adjoint_pairing", s.terms[0]},
             {"rhs:dirac_pairing", s.terms[1]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_bochner(const CliffordField& u, const Weight& w,
                             const Domain& dom, const QuadratureSpec& q) {
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();

  FieldFrame fu(n);
  Multivector du(n), delta(n), scratch(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double e = std::exp(-w.phi(x));
    dirac_from_frame_into(fu, du, scratch);
    gmul_vector_into(w.grad(x), fu.u, delta);
    delta.coeffs() = du.coeffs() - delta.coeffs();
    double grad_energy = 0.0;
    for (int j = 0; j < n; ++j) grad_energy += fu.du[j].squared_norm();
    acc[0].add(wq * e * delta.squared_norm());
    acc[1].add(wq * e * du.squared_norm());
    acc[2].add(wq * e * 2.0 * grad_energy);
    acc[3].add(wq * e * w.laplacian(x) * fu.u.squared_norm());
  };
  const SweepOutput s = run_sweep(ball, q, 4, node);

  IdentityReport r;
  r.name = "bochner";
  r.lhs = s.terms[0] + s.terms[1];
  r.rhs = s.terms[2] + s.terms[3];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"lhs:dirac_sq", s.terms[1]},
             {"rhs:grad_energy_x2", s.terms[2]},
             {"rhs:weight_mass", s.terms[3]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_weighted_identity(const CliffordField& u, const Weight& w,
                                       const KappaK& kk, const Domain& dom,
                                       const QuadratureSpec& q) {
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();
  const double threshold = static_cast<double>(n - 2) / n;
  const double c1 = std::sqrt(std::max(0.0, kk.k - threshold));
  const double c2 = std::sqrt(kk.kappa + kk.k);

  FieldFrame fu(n);
  Multivector du(n), dphi_u(n), twisted(n), scratch(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double e = std::exp(-w.phi(x));
    const Vec g = w.grad(x);
    dirac_from_frame_into(fu, du, scratch);
    gmul_vector_into(g, fu.u, dphi_u);
    // delta = Du - (Dphi)u
    scratch.coeffs() = du.coeffs() - dphi_u.coeffs();
    double grad_energy = 0.0;
    for (int j = 0; j < n; ++j) grad_energy += fu.du[j].squared_norm();
    twisted.coeffs() = c1 * du.coeffs() - c2 * dphi_u.coeffs();
    acc[0].add(wq * e * (1.0 + kk.k) * scratch.squared_norm());
    acc[1].add(wq * e * (w.laplacian(x) - kk.kappa * g.squaredNorm()) *
               fu.u.squared_norm());
    acc[2].add(wq * e * twisted.squared_norm());
    acc[3].add(wq * e * 2.0 *
               (grad_energy - du.squared_norm() / n));
  };
  const SweepOutput s = run_sweep(ball, q, 4, node);

  IdentityReport r;
  r.name = "weighted_identity";
  r.lhs = s.terms[0];
  r.rhs = s.terms[1] + s.terms[2] + s.terms[3];
  r.terms = {{"lhs:scaled_adjoint_sq", s.terms[0]},
             {"rhs:weight_mass", s.terms[1]},
             {"rhs:twisted_sq", s.terms[2]},
             {"rhs:trace_gap_x2", s.terms[3]}};
  r.margins = {{"apriori_margin", (s.terms[0] - s.terms[1]) / (1.0 + kk.k)}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

TraceInequalityResult check_trace_inequality(const CliffordField& u,
                                             const std::vector<Vec>& points) {
  const int n = u.dim();
  FieldFrame fu(n);
  Multivector du(n), scratch(n);
  TraceInequalityResult out;
  out.min_margin = std::numeric_limits<double>::infinity();
  out.min_scaled_margin = std::numeric_limits<double>::infinity();
  for (const Vec& x : points) {
    u.eval_frame(x, fu);
    dirac_from_frame_into(fu, du, scratch);
    double grad_energy = 0.0;
    for (int j = 0; j < n; ++j) grad_energy += fu.du[j].squared_norm();
    const double margin = grad_energy - du.squared_norm() / n;
    out.min_margin = std::min(out.min_margin, margin);
    out.min_scaled_margin = std::min(
        out.min_scaled_margin, margin / std::max(grad_energy, kScaleFloor));
  }
  return out;
}

IdentityReport check_general_identity(const CliffordField& u, const Weight& w,
                                      const MultiplierChoice& mult,
                                      const Domain& dom,
                                      const QuadratureSpec& q) {
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();

  FieldFrame fu(n);
  std::vector<Multivector> dU(static_cast<std::size_t>(n), Multivector(n));
  Multivector du(n), dphi_u(n), delta(n), bigU(n), duU(n), qmv(n), t1(n),
      t2(n), pu(n);
  MultiplierDerivWorkspace ws(n);
  Vec xs(n);

  auto div_eta_y = [&](const Vec& x) {
    if (mult.div_eta_y) return (*mult.div_eta_y)(x);
    const double h = kFdProductStep * std::max(1.0, x.norm());
    double acc = 0.0;
    Vec xp = x;
    for (int j = 0; j < n; ++j) {
      xp[j] = x[j] + h;
      acc += mult.eta(xp) * mult.y(xp)[j];
      xp[j] = x[j] - h;
      acc -= mult.eta(xp) * mult.y(xp)[j];
      xp[j] = x[j];
    }
    return acc / (2.0 * h);
  };
  auto lap_y_sq = [&](const Vec& x) {
    if (mult.lap_y_sq) return (*mult.lap_y_sq)(x);
    const double h =
        std::sqrt(kFdProductStep) * std::max(1.0, x.norm());
    const double mid = mult.y(x).squaredNorm();
    double acc = 0.0;
    Vec xp = x;
    for (int j = 0; j < n; ++j) {
      xp[j] = x[j] + h;
      acc += mult.y(xp).squaredNorm();
      xp[j] = x[j] - h;
      acc += mult.y(xp).squaredNorm();
      xp[j] = x[j];
    }
    return (acc - 2.0 * n * mid) / (h * h);
  };

  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double phi = w.phi(x);
    const double e = std::exp(-phi);
    const double eh = std::exp(-0.5 * phi);
    const Vec g = w.grad(x);
    const double eta = mult.eta(x);
    const Vec y = mult.y(x);

    dirac_from_frame_into(fu, du, t1);
    gmul_vector_into(g, fu.u, dphi_u);
    delta.coeffs() = du.coeffs() - dphi_u.coeffs();

    // U = e^{-phi/2} u, d_j U = e^{-phi/2} (d_j u - (d_j phi) u / 2)
    bigU.coeffs() = eh * fu.u.coeffs();
    for (int j = 0; j < n; ++j) {
      dU[static_cast<std::size_t>(j)].coeffs() =
          eh * (fu.du[j].coeffs() - 0.5 * g[j] * fu.u.coeffs());
    }
    duU.set_zero();
    for (int j = 1; j <= n; ++j) {
      gmul_basis_into(j, dU[static_cast<std::size_t>(j - 1)], t1);
      duU += t1;  // D U
    }

    // twisted = eta U + sum_j e_j Y d_j U
    qmv.coeffs() = eta * bigU.coeffs();
    for (int j = 1; j <= n; ++j) {
      gmul_vector_into(y, dU[static_cast<std::size_t>(j - 1)], t1);
      gmul_basis_into(j, t1, t2);
      qmv += t2;
    }

    acc[0].add(wq * e * delta.squared_norm());
    acc[1].add(wq * qmv.squared_norm());

    const double coeff = 0.25 * g.squaredNorm() - eta * eta -
                         2.0 * div_eta_y(x) + 0.5 * lap_y_sq(x);
    acc[2].add(wq * coeff * e * fu.u.squared_norm());

    // -<DU, (Dphi + 2 eta Y) U>_0
    xs = g + 2.0 * eta * y;
    gmul_vector_into(xs, bigU, pu);
    acc[3].add(-wq * inner(duU, pu));

    double aniso = 0.0;
    const double one_minus_y2 = 1.0 - y.squaredNorm();
    for (int j = 0; j < n; ++j) {
      aniso += dU[static_cast<std::size_t>(j)].squared_norm();
    }
    acc[4].add(wq * one_minus_y2 * aniso);

    multiplier_deriv_terms(mult.y, x, n, ws);
    double deriv = 0.0;
    for (int j = 0; j < n; ++j) {
      gmul_into(ws.mj[static_cast<std::size_t>(j)],
                dU[static_cast<std::size_t>(j)], t1);
      deriv += inner(t1, bigU);
    }
    acc[5].add(wq * deriv);
  };
  const SweepOutput s = run_sweep(ball, q, 6, node);

  IdentityReport r;
  r.name = "general_identity";
  r.lhs = s.terms[0] - s.terms[1];
  r.rhs = s.terms[2] + s.terms[3] + s.terms[4] + s.terms[5];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"lhs:twisted_sq", s.terms[1]},
             {"rhs:coeff_mass", s.terms[2]},
             {"rhs:mixed_pairing", s.terms[3]},
             {"rhs:aniso_grad", s.terms[4]},
             {"rhs:multiplier_deriv", s.terms[5]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_radial_identity(const CliffordField& u, double m,
                                     const Domain& dom,
                                     const QuadratureSpec& q) {
  if (m == 0.0) throw std::invalid_argument("radial identity requires m != 0");
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();
  {
    const bool origin_in_domain =
        dom.kind == Domain::Kind::box
            ? ((dom.lo.array() <= 0.0).all() && (dom.hi.array() >= 0.0).all())
            : dom.r0 <= 0.0;
    if (origin_in_domain || ball.center.norm() - ball.r1 <= 0.0) {
      throw std::invalid_argument("radial identity needs 0 outside the domain");
    }
  }
  const Weight w = Weight::radial_power(n, m);

  FieldFrame fu(n);
  Multivector du(n), dphi_u(n), tw(n), t1(n), t2(n);
  Vec xr(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    const double e = std::exp(-w.phi(x));
    dirac_from_frame_into(fu, du, t1);
    gmul_vector_into(w.grad(x), fu.u, dphi_u);
    dphi_u.coeffs() = du.coeffs() - dphi_u.coeffs();  // delta

    // |x| D((x/|x|^2) u) = |x| [ (2-n)/r^2 u + sum_j e_j (x/r^2) d_j u ]
    xr = x / r2;
    tw.coeffs() = ((2.0 - n) / r2) * fu.u.coeffs();
    for (int j = 1; j <= n; ++j) {
      gmul_vector_into(xr, fu.du[j - 1], t1);
      gmul_basis_into(j, t1, t2);
      tw += t2;
    }
    tw *= r;

    acc[0].add(wq * e * dphi_u.squared_norm());
    acc[1].add(wq * e * tw.squared_norm());
    acc[2].add(wq * e * m * m * std::pow(r, m - 2.0) * fu.u.squared_norm());
    acc[3].add(wq * e * fu.u.squared_norm());
  };
  const SweepOutput s = run_sweep(ball, q, 4, node);

  const double rmin = ball.center.norm() - ball.r1;
  const double rmax = ball.center.norm() + ball.r1;
  const double min_coeff =
      m * m * std::min(std::pow(rmin, m - 2.0), std::pow(rmax, m - 2.0));

  IdentityReport r;
  r.name = "radial_identity";
  r.lhs = s.terms[0];
  r.rhs = s.terms[1] + s.terms[2];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"rhs:twisted_sq", s.terms[1]},
             {"rhs:weight_mass", s.terms[2]},
             {"aux:norm_u_sq", s.terms[3]}};
  r.margins = {{"coercivity_margin", s.terms[0] - s.terms[2]},
               {"min_coeff_margin", s.terms[0] - min_coeff * s.terms[3]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_single_quadratic(const CliffordField& u,
                                      const Domain& dom,
                                      const QuadratureSpec& q) {
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();
  const Weight w = Weight::single_quadratic(n);

  FieldFrame fu(n);
  Multivector du(n), delta(n), tw(n), t1(n), t2(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double e = std::exp(-w.phi(x));
    dirac_from_frame_into(fu, du, t1);
    gmul_vector_into(w.grad(x), fu.u, delta);
    delta.coeffs() = du.coeffs() - delta.coeffs();

    // D(e_1 u) = sum_j e_j e_1 d_j u
    tw.set_zero();
    for (int j = 1; j <= n; ++j) {
      gmul_basis_into(1, fu.du[j - 1], t1);
      gmul_basis_into(j, t1, t2);
      tw += t2;
    }
    acc[0].add(wq * e * delta.squared_norm());
    acc[1].add(wq * e * tw.squared_norm());
    acc[2].add(wq * e * 2.0 * fu.u.squared_norm());
  };
  const SweepOutput s = run_sweep(ball, q, 3, node);

  IdentityReport r;
  r.name = "single_quadratic";
  r.lhs = s.terms[0];
  r.rhs = s.terms[1] + s.terms[2];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"rhs:twisted_sq", s.terms[1]},
             {"rhs:two_norm_sq", s.terms[2]}};
  r.margins = {{"coercivity_margin", s.terms[0] - s.terms[2]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_perturbed_coercivity(const CliffordField& u, const Vec& a,
                                          const Domain& dom,
                                          const QuadratureSpec& q) {
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();
  if (ball.center.norm() - ball.r1 <= 1.0) {
    throw std::invalid_argument(
        "perturbed Gaussian estimate needs support exterior to B(0,1)");
  }
  const Weight w = Weight::aniso_quadratic(a);

  FieldFrame fu(n);
  Multivector du(n), delta(n), t1(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double e = std::exp(-w.phi(x));
    dirac_from_frame_into(fu, du, t1);
    gmul_vector_into(w.grad(x), fu.u, delta);
    delta.coeffs() = du.coeffs() - delta.coeffs();
    acc[0].add(wq * e * delta.squared_norm());
    acc[1].add(wq * e * 3.0 * fu.u.squared_norm());
  };
  const SweepOutput s = run_sweep(ball, q, 2, node);

  IdentityReport r;
  r.name = "perturbed_coercivity";
  r.lhs = s.terms[0];
  r.rhs = s.terms[1];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"rhs:three_norm_sq", s.terms[1]}};
  r.margins = {{"coercivity_margin", s.terms[0] - s.terms[1]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_general_application(const CliffordField& u,
                                         const Weight& w, const Domain& dom,
                                         const QuadratureSpec& q, double aux_k,
                                         double aux_eps) {
  const Domain ball = support_domain(u, dom);
  const int n = u.dim();

  auto yfn = [&w](const Vec& x) {
    Vec g = w.grad(x);
    const double gn = g.norm();
    if (gn <= 0.0) {
      throw std::domain_error(
          "|grad phi| vanishes inside the domain; the normalized-gradient "
          "multiplier is singular there");
    }
    return Vec(g / gn);
  };

  FieldFrame fu(n);
  std::vector<Multivector> dU(static_cast<std::size_t>(n), Multivector(n));
  Multivector du(n), delta(n), tw(n), bigU(n), t1(n), t2(n);
  MultiplierDerivWorkspace ws(n);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double phi = w.phi(x);
    const double e = std::exp(-phi);
    const double eh = std::exp(-0.5 * phi);
    const double lap = w.laplacian(x);
    const Vec g = w.grad(x);
    const Vec y = yfn(x);

    dirac_from_frame_into(fu, du, t1);
    gmul_vector_into(g, fu.u, delta);
    delta.coeffs() = du.coeffs() - delta.coeffs();

    // twisted field sum_j e_j (Dphi/|Dphi|) d_j u, measured in the phi-norm
    tw.set_zero();
    for (int j = 1; j <= n; ++j) {
      gmul_vector_into(y, fu.du[j - 1], t1);
      gmul_basis_into(j, t1, t2);
      tw += t2;
    }

    bigU.coeffs() = eh * fu.u.coeffs();
    for (int j = 0; j < n; ++j) {
      dU[static_cast<std::size_t>(j)].coeffs() =
          eh * (fu.du[j].coeffs() - 0.5 * g[j] * fu.u.coeffs());
    }

    multiplier_deriv_terms(yfn, x, n, ws);
    double deriv = 0.0;
    for (int j = 0; j < n; ++j) {
      gmul_into(ws.mj[static_cast<std::size_t>(j)],
                dU[static_cast<std::size_t>(j)], t1);
      deriv += inner(t1, bigU);
    }

    acc[0].add(wq * e * delta.squared_norm());
    acc[1].add(wq * e * tw.squared_norm());
    acc[2].add(wq * e * lap * fu.u.squared_norm());
    acc[3].add(wq * deriv);
  };
  const SweepOutput s = run_sweep(ball, q, 4, node);

  IdentityReport r;
  r.name = "general_application";
  r.lhs = s.terms[0] - s.terms[1];
  r.rhs = s.terms[2] + s.terms[3];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"lhs:twisted_sq", s.terms[1]},
             {"rhs:weight_mass", s.terms[2]},
             {"rhs:multiplier_deriv", s.terms[3]}};
  r.margins = {
      {"aux_hypothesis",
       aux_k * s.terms[0] + (1.0 - aux_eps) * s.terms[2] + s.terms[3]},
      {"implied_bound",
       s.terms[0] - aux_eps / (1.0 + aux_k) * s.terms[2]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

IdentityReport check_apriori_2d(const CliffordField& u, const Weight& w,
                                const Domain& dom, const QuadratureSpec& q) {
  if (u.dim() != 2) {
    throw std::invalid_argument("the a priori identity is two-dimensional");
  }
  const Domain ball = support_domain(u, dom);

  FieldFrame fu(2);
  Multivector du(2), delta(2), split(2), t1(2), t2(2);
  auto node = [&](const Vec& x, double wq,
                  std::vector<PairwiseAccumulator>& acc) {
    u.eval_frame(x, fu);
    const double e = std::exp(-w.phi(x));
    dirac_from_frame_into(fu, du, t1);
    gmul_vector_into(w.grad(x), fu.u, delta);
    delta.coeffs() = du.coeffs() - delta.coeffs();
    gmul_basis_into(1, fu.du[0], t1);
    gmul_basis_into(2, fu.du[1], t2);
    split.coeffs() = t1.coeffs() - t2.coeffs();
    acc[0].add(wq * e * delta.squared_norm());
    acc[1].add(wq * e * split.squared_norm());
    acc[2].add(wq * e * w.laplacian(x) * fu.u.squared_norm());
  };
  const SweepOutput s = run_sweep(ball, q, 3, node);

  IdentityReport r;
  r.name = "apriori_2d";
  r.lhs = s.terms[0];
  r.rhs = s.terms[1] + s.terms[2];
  r.terms = {{"lhs:adjoint_sq", s.terms[0]},
             {"rhs:split_dirac_sq", s.terms[1]},
             {"rhs:weight_mass", s.terms[2]}};
  r.margins = {{"coercivity_margin", s.terms[0] - s.terms[2]}};
  r.est_error = s.est_error;
  r.nodes_used = s.nodes;
  finalize(r);
  return r;
}

const char* identity_kind_name(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::adjoint: return "adjoint";
    case IdentityKind::bochner: return "bochner";
    case IdentityKind::weighted: return "weighted";
    case IdentityKind::general: return "general";
    case IdentityKind::radial: return "radial";
    case IdentityKind::quadratic: return "quadratic";
    case IdentityKind::perturbed: return "perturbed";
    case IdentityKind::subharmonic: return "subharmonic";
    case IdentityKind::apriori2d: return "apriori2d";
  }
  return "unknown";
}

SupportBall random_ball_in(const Domain& dom, Rng& rng) {
  const int n = dom.dim;
  SupportBall ball;
  if (dom.kind == Domain::Kind::box) {
    const double side = (dom.hi - dom.lo).minCoeff();
    ball.radius = rng.uniform(0.15, 0.3) * side;
    ball.center.resize(n);
    for (int j = 0; j < n; ++j) {
      ball.center[j] =
          rng.uniform(dom.lo[j] + 1.02 * ball.radius,
                      dom.hi[j] - 1.02 * ball.radius);
    }
    return ball;
  }
  const double width = dom.r1 - dom.r0;
  ball.radius = rng.uniform(0.14, 0.3) * width;
  const double rc =
      rng.uniform(dom.r0 + 1.05 * ball.radius, dom.r1 - 1.05 * ball.radius);
  Vec dir(n);
  for (int j = 0; j < n; ++j) dir[j] = rng.normal();
  dir.normalize();
  ball.center = rc * dir;
  return ball;
}

std::vector<IdentityReport> run_identity_trials(
    IdentityKind kind, const Weight& w, const Domain& dom,
    const QuadratureSpec& q, int trials, std::uint64_t seed,
    const TrialParams& params) {
  if (trials < 1) throw std::invalid_argument("trial count must be >= 1");
  const int n = dom.dim;
  std::vector<IdentityReport> reports;
  reports.reserve(static_cast<std::size_t>(trials));
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    const SupportBall ball = random_ball_in(dom, rng);
    const CliffordField u = bump_field(
        ball.center, ball.radius, PolyMV::random(n, params.bump_degree, rng));
    IdentityReport r;
    switch (kind) {
      case IdentityKind::adjoint: {
        const CliffordField v = bump_field(
            ball.center, ball.radius,
            PolyMV::random(n, params.bump_degree, rng));
        r = check_adjoint_duality(u, v, w, dom, q);
        break;
      }
      case IdentityKind::bochner:
        r = check_bochner(u, w, dom, q);
        break;
      case IdentityKind::weighted:
        r = check_weighted_identity(u, w, KappaK::from_kappa(n, params.kappa),
                                    dom, q);
        break;
      case IdentityKind::general: {
        const MultiplierChoice mult =
            (w.kind() == Weight::Kind::radial_power)
                ? radial_multiplier(n, w.power())
                : normalized_gradient_multiplier(w);
        r = check_general_identity(u, w, mult, dom, q);
        break;
      }
      case IdentityKind::radial:
        r = check_radial_identity(u, w.power(), dom, q);
        break;
      case IdentityKind::quadratic:
        r = check_single_quadratic(u, dom, q);
        break;
      case IdentityKind::perturbed:
        r = check_perturbed_coercivity(u, w.aniso_coeffs(), dom, q);
        break;
      case IdentityKind::subharmonic:
        r = check_general_application(u, w, dom, q, params.aux_k,
                                      params.aux_eps);
        break;
      case IdentityKind::apriori2d:
        r = check_apriori_2d(u, w, dom, q);
        break;
    }
    r.name = std::string(identity_kind_name(kind)) + "/trial" +
             std::to_string(trial);
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace diraclab
