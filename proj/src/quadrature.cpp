#include "diraclab/quadrature.hpp"

#include "diraclab/special_functions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diraclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Radial panel breakpoints: user range split geometrically (ratio 2) so that
// slowly decaying power-law integrands are resolved out to large radii, with
// an extra break at r = 1 where the built-in weights change scale.
std::vector<double> radial_breaks(double a, double b) {
  std::vector<double> breaks{a};
  if (a > 0.0 && 1.0 > a && 1.0 < b) breaks.push_back(1.0);
  double lead = breaks.back();
  if (lead > 0.0) {
    double r = lead * 2.0;
    while (r < b * 0.75) {
      breaks.push_back(r);
      r *= 2.0;
    }
  }
  breaks.push_back(b);
  return breaks;
}

}  // namespace

Rule1D gauss_jacobi_sym(int n, double mu) {
  if (n < 1) throw std::invalid_argument("rule size must be >= 1");
  if (!(mu > -1.0)) throw std::invalid_argument("Jacobi exponent must exceed -1");
  // Symmetric Jacobi (alpha = beta = mu): zero diagonal, off-diagonal from the
  // standard three-term recurrence for monic Jacobi polynomials.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + 2.0 * mu;
    const double num = 4.0 * k * (k + mu) * (k + mu) * (k + 2.0 * mu);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    const double off = std::sqrt(num / den);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  const double mass = std::pow(2.0, 2.0 * mu + 1.0) *
                      std::tgamma(mu + 1.0) * std::tgamma(mu + 1.0) /
                      std::tgamma(2.0 * mu + 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Rule1D rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mass * v0 * v0;
  }
  return rule;
}

Rule1D gauss_legendre(int n) { return gauss_jacobi_sym(n, 0.0); }

double sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

SphereRule sphere_rule(int n, int level) {
  if (n < 2) throw std::invalid_argument("sphere rule needs n >= 2");
  if (level < 1) throw std::invalid_argument("sphere rule level must be >= 1");
  SphereRule rule;
  if (n == 2) {
    const int m = std::max(level + 1, 4);
    rule.nodes.resize(m, 2);
    rule.weights = Eigen::VectorXd::Constant(m, 2.0 * kPi / m);
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * kPi * i / m;
      rule.nodes(i, 0) = std::cos(a);
      rule.nodes(i, 1) = std::sin(a);
    }
    return rule;
  }

  // Polar angles theta_k, k = 1..n-2, with Jacobian sin^{n-1-k}(theta_k);
  // substitute t = cos(theta) and use Gauss-Jacobi with mu = (n-2-k)/2.
  const int npolar = (level + 2) / 2;
  std::vector<Rule1D> polar;
  for (int k = 1; k <= n - 2; ++k) {
    const double mu = 0.5 * (n - 2 - k);
    polar.push_back(gauss_jacobi_sym(npolar, mu));
  }
  const int mazi = std::max(level + 1, 4);
  const double wazi = 2.0 * kPi / mazi;

  std::int64_t total = mazi;
  for (const Rule1D& r : polar) total *= r.nodes.size();
  rule.nodes.resize(total, n);
  rule.weights.resize(total);

  Eigen::VectorXd coord(n);
  std::vector<int> idx(polar.size(), 0);
  std::int64_t row = 0;
  // Iterate the polar product in odometer order, azimuth innermost.
  while (true) {
    double sinprod = 1.0;
    double w = 1.0;
    for (std::size_t k = 0; k < polar.size(); ++k) {
      const double t = polar[k].nodes[idx[k]];
      w *= polar[k].weights[idx[k]];
      coord[static_cast<int>(k)] = sinprod * t;
      sinprod *= std::sqrt(std::max(0.0, 1.0 - t * t));
    }
    for (int i = 0; i < mazi; ++i) {
      const double a = 2.0 * kPi * i / mazi;
      coord[n - 2] = sinprod * std::cos(a);
      coord[n - 1] = sinprod * std::sin(a);
      rule.nodes.row(row) = coord;
      rule.weights[row] = w * wazi;
      ++row;
    }
    std::size_t k = polar.size();
    while (k > 0) {
      --k;
      if (++idx[k] < polar[k].nodes.size()) break;
      idx[k] = 0;
      if (k == 0) return rule;
    }
    if (polar.empty()) break;
  }
  return rule;
}

Domain Domain::annulus(int n, double r0, double r1) {
  if (!(0.0 < r0 && r0 < r1)) {
    throw std::invalid_argument("annulus requires 0 < r0 < r1");
  }
  Domain d;
  d.kind = Kind::annulus;
  d.dim = n;
  d.r0 = r0;
  d.r1 = r1;
  return d;
}

Domain Domain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || ((hi - lo).array() <= 0.0).any()) {
    throw std::invalid_argument("box requires lo < hi componentwise");
  }
  Domain d;
  d.kind = Kind::box;
  d.dim = static_cast<int>(lo.size());
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

Domain Domain::exterior_truncated(int n, double r0, double R,
                                  double tail_bound) {
  if (!(1.0 <= r0 && r0 < R)) {
    throw std::invalid_argument("exterior domain requires 1 <= r0 < R");
  }
  Domain d;
  d.kind = Kind::exterior_truncated;
  d.dim = n;
  d.r0 = r0;
  d.r1 = R;
  d.tail_bound = tail_bound;
  return d;
}

Domain Domain::ball(Vec center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ball radius must be > 0");
  Domain d;
  d.kind = Kind::ball;
  d.dim = static_cast<int>(center.size());
  d.center = std::move(center);
  d.r0 = 0.0;
  d.r1 = radius;
  return d;
}

bool Domain::contains_ball(const SupportBall& b) const {
  switch (kind) {
    case Kind::annulus:
    case Kind::exterior_truncated: {
      const double rc = b.center.norm();
      return rc - b.radius >= r0 && rc + b.radius <= r1;
    }
    case Kind::box:
      return ((b.center.array() - b.radius) >= lo.array()).all() &&
             ((b.center.array() + b.radius) <= hi.array()).all();
    case Kind::ball:
      return (b.center - center).norm() + b.radius <= r1;
  }
  return false;
}

namespace {

QuadGrid radial_sphere_grid(const Domain& dom, const QuadratureSpec& q) {
  const int n = dom.dim;
  const SphereRule sph = sphere_rule(n, q.sphere_level);
  const Rule1D gl = gauss_legendre(q.radial_nodes);
  const std::vector<double> breaks = (dom.kind == Domain::Kind::ball)
                                         ? std::vector<double>{0.0, dom.r1}
                                         : radial_breaks(dom.r0, dom.r1);
  const std::int64_t nsph = sph.weights.size();
  const std::int64_t npanels = static_cast<std::int64_t>(breaks.size()) - 1;
  const std::int64_t nrad = npanels * q.radial_nodes;

  QuadGrid grid;
  grid.points.resize(nrad * nsph, n);
  grid.weights.resize(nrad * nsph);
  std::int64_t row = 0;
  for (std::int64_t p = 0; p < npanels; ++p) {
    const double a = breaks[static_cast<std::size_t>(p)];
    const double b = breaks[static_cast<std::size_t>(p + 1)];
    for (int i = 0; i < q.radial_nodes; ++i) {
      const double r = 0.5 * (b - a) * (gl.nodes[i] + 1.0) + a;
      const double wr = 0.5 * (b - a) * gl.weights[i] * std::pow(r, n - 1);
      for (std::int64_t s = 0; s < nsph; ++s) {
        if (dom.kind == Domain::Kind::ball) {
          grid.points.row(row) =
              dom.center.transpose() + r * sph.nodes.row(s);
        } else {
          grid.points.row(row) = r * sph.nodes.row(s);
        }
        grid.weights[row] = wr * sph.weights[s];
        ++row;
      }
    }
  }
  return grid;
}

QuadGrid box_grid(const Domain& dom, const QuadratureSpec& q) {
  const int n = dom.dim;
  const Rule1D gl = gauss_legendre(q.box_nodes);
  std::int64_t total = 1;
  for (int j = 0; j < n; ++j) total *= q.box_nodes;
  QuadGrid grid;
  grid.points.resize(total, n);
  grid.weights.resize(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd x(n);
  for (std::int64_t row = 0; row < total; ++row) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      const double half = 0.5 * (dom.hi[j] - dom.lo[j]);
      x[j] = dom.lo[j] + half * (gl.nodes[idx[static_cast<std::size_t>(j)]] + 1.0);
      w *= half * gl.weights[idx[static_cast<std::size_t>(j)]];
    }
    grid.points.row(row) = x;
    grid.weights[row] = w;
    int j = n - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == q.box_nodes) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
  }
  return grid;
}

}  // namespace

QuadGrid build_grid(const Domain& dom, const QuadratureSpec& q) {
  if (dom.kind == Domain::Kind::box) return box_grid(dom, q);
  return radial_sphere_grid(dom, q);
}

double pairwise_sum(const double* data, std::int64_t size) {
  if (size <= 8) {
    double s = 0.0;
    for (std::int64_t i = 0; i < size; ++i) s += data[i];
    return s;
  }
  const std::int64_t half = size / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, size - half);
}

double integrate_on(const QuadGrid& grid,
                    const std::function<double(const Vec&)>& f) {
  PairwiseAccumulator acc;
  Vec x(grid.points.cols());
  for (std::int64_t i = 0; i < grid.size(); ++i) {
    x = grid.points.row(i);
    acc.add(grid.weights[i] * f(x));
  }
  return acc.total();
}

IntegralValue integrate(const Domain& dom, const QuadratureSpec& q,
                        const std::function<double(const Vec&)>& f) {
  const QuadGrid fine = build_grid(dom, q);
  const QuadGrid coarse = build_grid(dom, q.coarser());
  IntegralValue out;
  out.value = integrate_on(fine, f);
  out.est_error = std::abs(out.value - integrate_on(coarse, f));
  out.nodes_used = fine.size() + coarse.size();
  return out;
}

IntegralValue weighted_inner(const CliffordField& u, const CliffordField& v,
                             const Weight& w, const Domain& dom,
                             const QuadratureSpec& q) {
  if (u.dim() != dom.dim || v.dim() != dom.dim || w.dim() != dom.dim) {
    throw std::invalid_argument("weighted_inner dimension mismatch");
  }
  auto f = [&](const Vec& x) {
    return inner(u(x), v(x)) * std::exp(-w.phi(x));
  };
  return integrate(dom, q, f);
}

IntegralValue weighted_norm_sq(const CliffordField& u, const Weight& w,
                               const Domain& dom, const QuadratureSpec& q) {
  auto f = [&](const Vec& x) {
    return u(x).squared_norm() * std::exp(-w.phi(x));
  };
  return integrate(dom, q, f);
}

double truncation_radius(const Weight& w, double decay_exponent, double tol,
                         double r0) {
  if (r0 <= 0.0) throw std::invalid_argument("truncation needs r0 > 0");
  if (std::isinf(tol)) return r0;  // empty tail requested
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const int n = w.dim();
  const double p = decay_exponent + n - 1;

  auto power_tail = [&](double q_exp) {
    // int_R^inf r^{q} dr = R^{q+1} / (-q-1), q < -1
    if (q_exp >= -1.0) {
      throw std::invalid_argument(
          "non-integrable tail: power exponent >= -1 for this weight");
    }
    const double root = std::pow((-q_exp - 1.0) * tol, 1.0 / (q_exp + 1.0));
    return root;
  };

  double radius = r0;
  switch (w.kind()) {
    case Weight::Kind::log_radial:
      // e^{-phi} = r^{-n}; integrand r^{p - n}
      radius = power_tail(p - n);
      break;
    case Weight::Kind::radial_power: {
      const double m = w.power();
      if (m < 0.0) {
        // e^{-r^m} <= 1 for r >= ~1
        radius = power_tail(p);
        break;
      }
      // tail(R) = (1/m) Gamma((p+1)/m, R^m)
      const double a = (p + 1.0) / m;
      if (!(a > 0.0)) {
        radius = power_tail(p);
        break;
      }
      auto tail = [&](double R) {
        return upper_incomplete_gamma(a, std::pow(R, m)) / m;
      };
      double lo = r0, hi = std::max(r0, 2.0);
      while (tail(hi) > tol) {
        hi *= 2.0;
        if (hi > 1e9) throw std::invalid_argument("tail tolerance unreachable");
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > tol ? lo : hi) = mid;
      }
      radius = hi;
      break;
    }
    case Weight::Kind::aniso_quadratic: {
      const double amin = w.aniso_coeffs().minCoeff();
      const double a = 0.5 * (p + 1.0);
      if (!(a > 0.0)) {
        radius = power_tail(p);
        break;
      }
      auto tail = [&](double R) {
        return 0.5 * std::pow(amin, -a) *
               upper_incomplete_gamma(a, amin * R * R);
      };
      double lo = r0, hi = std::max(r0, 2.0);
      while (tail(hi) > tol) {
        hi *= 2.0;
        if (hi > 1e9) throw std::invalid_argument("tail tolerance unreachable");
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > tol ? lo : hi) = mid;
      }
      radius = hi;
      break;
    }
    case Weight::Kind::zero:
    case Weight::Kind::single_quadratic:
    case Weight::Kind::custom:
      // No radial decay credited to the weight.
      radius = power_tail(p);
      break;
  }
  return std::max(r0, std::ceil(radius));
}

double closed_form_radial(RadialShape shape, double p, double a, double b) {
  if (a < 0.0 || b < a) throw std::invalid_argument("invalid radial bounds");
  if (shape == RadialShape::power) {
    const bool infinite = std::isinf(b);
    if (p == -1.0) {
      if (infinite || a == 0.0) {
        throw std::invalid_argument("divergent radial integral (p = -1)");
      }
      return std::log(b / a);
    }
    if (infinite && p > -1.0) {
      throw std::invalid_argument("divergent radial integral at infinity");
    }
    if (a == 0.0 && p < -1.0) {
      throw std::invalid_argument("divergent radial integral at zero");
    }
    const double upper = infinite ? 0.0 : std::pow(b, p + 1.0);
    const double lower = (a == 0.0) ? 0.0 : std::pow(a, p + 1.0);
    return (upper - lower) / (p + 1.0);
  }
  // int r^p e^{-r^2} dr = (1/2) [gamma(s, b^2) - gamma(s, a^2)], s = (p+1)/2
  const double s = 0.5 * (p + 1.0);
  if (!(s > 0.0)) {
    throw std::invalid_argument("divergent Gaussian radial integral at zero");
  }
  const double upper = std::isinf(b) ? std::tgamma(s)
                                     : lower_incomplete_gamma(s, b * b);
  const double lower = lower_incomplete_gamma(s, a * a);
  return 0.5 * (upper - lower);
}

}  // namespace diraclab
