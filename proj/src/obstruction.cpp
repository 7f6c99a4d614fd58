#include "diraclab/obstruction.hpp"

#include "diraclab/rng.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace diraclab {

namespace {

void require_dimension(int n) {
  if (n < 3) {
    throw std::invalid_argument(
        "the obstruction needs n >= 3 (for n = 2 the weight Laplacian "
        "n(n-2)/|x|^2 vanishes)");
  }
}

// int_1^inf F(r) dr via the compactifying substitution t = r^{-2/m}:
// dr = -(m/2) t^{-m/2-1} dt, so the integral becomes
// (m/2) int_0^1 F(t^{-m/2}) t^{-m/2-1} dt with a smooth integrand for the
// slowly decaying counterexample profiles.
double integrate_substituted(int m, const std::function<double(double)>& f,
                             int nodes) {
  const Rule1D gl = gauss_legendre(nodes);
  PairwiseAccumulator acc;
  const double half_m = 0.5 * m;
  for (int i = 0; i < gl.nodes.size(); ++i) {
    const double t = 0.5 * (gl.nodes[i] + 1.0);
    const double r = std::pow(t, -half_m);
    acc.add(0.5 * gl.weights[i] * half_m * f(r) * std::pow(t, -half_m - 1.0));
  }
  return acc.total();
}

}  // namespace

CliffordField obstruction_u(int n, int m) {
  const double inv_m = 1.0 / m;
  auto eval = [n, inv_m](const Vec& x) {
    const double r = x.norm();
    if (r == 0.0) throw std::domain_error("u_m is singular at the origin");
    Multivector out(n);
    out[0] = std::pow(r, -inv_m);
    return out;
  };
  auto frame = [n, inv_m](const Vec& x, FieldFrame& out) {
    const double r = x.norm();
    if (r == 0.0) throw std::domain_error("u_m is singular at the origin");
    out.u.set_zero();
    out.u[0] = std::pow(r, -inv_m);
    const double fac = -inv_m * std::pow(r, -inv_m - 2.0);
    for (int j = 0; j < n; ++j) {
      out.du[j].set_zero();
      out.du[j][0] = fac * x[j];
    }
  };
  return CliffordField(n, std::move(eval), std::move(frame));
}

CliffordField obstruction_f(int n, int m) {
  const double inv_m = 1.0 / m;
  auto eval = [n, inv_m](const Vec& x) {
    const double r = x.norm();
    if (r == 0.0) throw std::domain_error("f_m is singular at the origin");
    Multivector out = Multivector::vector(x);
    out *= -inv_m * std::pow(r, -inv_m - 2.0);
    return out;
  };
  return CliffordField(n, std::move(eval));
}

ObstructionResult counterexample_norms(int n, int m) {
  require_dimension(n);
  if (m < 1) throw std::invalid_argument("index m must be a positive integer");
  const double sigma = sphere_area(n);
  ObstructionResult out;
  out.n = n;
  out.m = m;
  out.norm_u_sq = 0.5 * m * sigma;
  out.weighted_f_integral = sigma / (2.0 * m * n * (n - 2.0));
  out.ratio = static_cast<double>(m) * m * n * (n - 2.0);
  return out;
}

ObstructionResult counterexample_quadrature_crosscheck(int n, int m,
                                                       double tol,
                                                       std::uint64_t seed) {
  ObstructionResult out = counterexample_norms(n, m);
  const Weight w = Weight::log_radial(n);
  const double sigma = sphere_area(n);
  const int nodes = 48;

  const CliffordField u = obstruction_u(n, m);
  const CliffordField f = obstruction_f(n, m);
  auto f_integrand = [&](const Vec& x) {
    return f(x).squared_norm() / w.laplacian(x) * std::exp(-w.phi(x));
  };

  if (m >= 10) {
    // Truncation radii grow like tol^{-m/2}; substitute instead. The fields
    // are rotation invariant, so the sphere factor is exact and the radial
    // profile is evaluated through the fields along a fixed direction.
    out.truncation_R = std::numeric_limits<double>::infinity();
    Vec dir = Vec::Zero(n);
    auto along = [&](double r) {
      dir[0] = r;
      return dir;
    };
    out.quad_norm_u_sq =
        sigma * integrate_substituted(
                    m,
                    [&](double r) {
                      const Vec x = along(r);
                      return u(x).squared_norm() * std::exp(-w.phi(x)) *
                             std::pow(r, n - 1);
                    },
                    nodes);
    out.quad_weighted_f =
        sigma * integrate_substituted(
                    m,
                    [&](double r) {
                      return f_integrand(along(r)) * std::pow(r, n - 1);
                    },
                    nodes);
  } else {
    const double tail_tol = tol * out.weighted_f_integral * 0.1;
    const double R = truncation_radius(w, -2.0 / m, tail_tol, 1.0);
    out.truncation_R = R;
    const Domain dom = Domain::exterior_truncated(n, 1.0, R, tail_tol);
    QuadratureSpec q;
    q.radial_nodes = nodes;
    q.sphere_level = 6;
    out.quad_norm_u_sq = weighted_norm_sq(u, w, dom, q).value;
    out.quad_weighted_f = integrate(dom, q, f_integrand).value;
  }
  out.rel_err_u =
      std::abs(out.quad_norm_u_sq - out.norm_u_sq) / out.norm_u_sq;
  out.rel_err_f = std::abs(out.quad_weighted_f - out.weighted_f_integral) /
                  out.weighted_f_integral;

  // Pointwise Du_m = f_m at seeded random points, via finite-difference
  // Dirac of the plain evaluator (independent of the analytic partials).
  const CliffordField u_eval_only(n, [n, m](const Vec& x) {
    Multivector out_mv(n);
    out_mv[0] = std::pow(x.norm(), -1.0 / m);
    return out_mv;
  });
  const CliffordField f_field = obstruction_f(n, m);
  Rng rng(seed);
  double max_resid = 0.0;
  for (int s = 0; s < 50; ++s) {
    Vec dir(n);
    for (int j = 0; j < n; ++j) dir[j] = rng.normal();
    dir.normalize();
    const Vec x = rng.uniform(1.01, 5.0) * dir;
    const Multivector du = dirac(u_eval_only, x);
    max_resid = std::max(max_resid, (du - f_field(x)).norm());
  }
  out.pointwise_dirac_residual = max_resid;
  return out;
}

OuterMonogenic make_outer_monogenic(const MonogenicPolynomial& p) {
  return OuterMonogenic{kelvin(p.as_field()), p.degree()};
}

void require_weighted_integrable(const CliffordField& h, int n) {
  Rng rng(12345);
  double near = 0.0, far = 0.0;
  for (int s = 0; s < 8; ++s) {
    Vec dir(n);
    for (int j = 0; j < n; ++j) dir[j] = rng.normal();
    dir.normalize();
    near += h(Vec(2.0 * dir)).norm();
    far += h(Vec(8.0 * dir)).norm();
  }
  if (far > near) {
    throw std::invalid_argument(
        "field grows with radius: a polynomial part is not in the weighted "
        "space on the exterior domain");
  }
}

double orthogonality_pairing(int n, int m, const OuterMonogenic& h,
                             double tol) {
  require_dimension(n);
  require_weighted_integrable(h.field, n);
  const Weight w = Weight::log_radial(n);
  const CliffordField u = obstruction_u(n, m);

  // Pairing integrand decays like r^{-1/m - (n + d - 1)} * e^{-phi}; the
  // L2 norms of u_m and h decay no faster, so one radius serves all three.
  const double decay = -1.0 / m - (n + h.poly_degree - 1.0);
  const double R = truncation_radius(w, decay, tol * 1e-3, 1.0);
  const Domain dom = Domain::exterior_truncated(n, 1.0, std::max(R, 16.0));

  QuadratureSpec q;
  q.radial_nodes = 32;
  q.sphere_level = std::max(8, 2 * h.poly_degree + 6);

  const IntegralValue pairing = weighted_inner(u, h.field, w, dom, q);
  const IntegralValue nu = weighted_norm_sq(u, w, dom, q);
  const IntegralValue nh = weighted_norm_sq(h.field, w, dom, q);
  return std::abs(pairing.value) / std::sqrt(nu.value * nh.value);
}

double spherical_mean(const CliffordField& h, double r, int level) {
  const SphereRule rule = sphere_rule(h.dim(), level);
  PairwiseAccumulator acc;
  Vec x(h.dim());
  for (std::int64_t i = 0; i < rule.weights.size(); ++i) {
    x = r * rule.nodes.row(i);
    acc.add(rule.weights[i] * h(x).re());
  }
  return std::abs(acc.total());
}

}  // namespace diraclab
