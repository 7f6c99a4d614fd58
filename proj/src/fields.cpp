#include "diraclab/fields.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace diraclab {

namespace {

const double kFdStepScale =
    std::cbrt(std::numeric_limits<double>::epsilon());

double radius_guard(const Vec& x) {
  const double r = x.norm();
  if (r == 0.0) {
    throw std::domain_error("field evaluation at a singular point (x = 0)");
  }
  return r;
}

}  // namespace

CliffordField::CliffordField(int dim, Eval eval)
    : dim_(dim), eval_(std::move(eval)) {}

CliffordField::CliffordField(int dim, Eval eval, FrameEval frame_eval)
    : dim_(dim), eval_(std::move(eval)), frame_eval_(std::move(frame_eval)) {}

CliffordField CliffordField::with_support(Vec center, double radius) const {
  if (radius <= 0.0) {
    throw std::invalid_argument("support radius must be positive");
  }
  CliffordField f = *this;
  f.support_ = SupportBall{std::move(center), radius};
  return f;
}

void CliffordField::eval_frame(const Vec& x, FieldFrame& out) const {
  if (frame_eval_) {
    frame_eval_(x, out);
    return;
  }
  out.u = eval_(x);
  const double h = std::max(1.0, x.norm()) * kFdStepScale;
  Vec xp = x;
  for (int j = 0; j < dim_; ++j) {
    xp[j] = x[j] + h;
    const Multivector up = eval_(xp);
    xp[j] = x[j] - h;
    const Multivector um = eval_(xp);
    xp[j] = x[j];
    out.du[j] = (up - um) * (0.5 / h);
  }
}

std::vector<Multivector> CliffordField::partials(const Vec& x) const {
  FieldFrame frame(dim_);
  eval_frame(x, frame);
  return frame.du;
}

Multivector dirac_from_frame(const FieldFrame& frame) {
  const int n = frame.u.dim();
  Multivector out(n);
  Multivector scratch(n);
  dirac_from_frame_into(frame, out, scratch);
  return out;
}

void dirac_from_frame_into(const FieldFrame& frame, Multivector& out,
                           Multivector& scratch) {
  const int n = frame.u.dim();
  out.set_zero();
  for (int j = 1; j <= n; ++j) {
    gmul_basis_into(j, frame.du[j - 1], scratch);
    out += scratch;
  }
}

Multivector dirac(const CliffordField& u, const Vec& x) {
  FieldFrame frame(u.dim());
  u.eval_frame(x, frame);
  return dirac_from_frame(frame);
}

Multivector adjoint_formal(const CliffordField& u, const Weight& w,
                           const Vec& x) {
  FieldFrame frame(u.dim());
  u.eval_frame(x, frame);
  Multivector out = dirac_from_frame(frame);
  Multivector dphi_u(u.dim());
  gmul_vector_into(w.grad(x), frame.u, dphi_u);
  out -= dphi_u;
  return out;
}

// ---------------------------------------------------------------------------
// Weight
// ---------------------------------------------------------------------------

Weight Weight::zero(int n) {
  Weight w(Kind::zero, n);
  return w;
}

Weight Weight::log_radial(int n) {
  Weight w(Kind::log_radial, n);
  return w;
}

Weight Weight::radial_power(int n, double m) {
  if (m == 0.0) {
    throw std::invalid_argument("radial_power requires m != 0");
  }
  Weight w(Kind::radial_power, n);
  w.m_ = m;
  return w;
}

Weight Weight::single_quadratic(int n) {
  Weight w(Kind::single_quadratic, n);
  return w;
}

Weight Weight::aniso_quadratic(const Vec& a) {
  if ((a.array() <= 0.0).any()) {
    throw std::invalid_argument("aniso_quadratic requires all a_i > 0");
  }
  Weight w(Kind::aniso_quadratic, static_cast<int>(a.size()));
  w.a_ = a;
  return w;
}

Weight Weight::custom(int n, std::function<double(const Vec&)> phi,
                      std::function<Vec(const Vec&)> grad,
                      std::function<double(const Vec&)> laplacian) {
  Weight w(Kind::custom, n);
  w.phi_ = std::move(phi);
  w.grad_ = std::move(grad);
  w.lap_ = std::move(laplacian);
  return w;
}

Weight weight_builtin(Weight::Kind kind, const Vec& params, int n) {
  switch (kind) {
    case Weight::Kind::zero:
      return Weight::zero(n);
    case Weight::Kind::log_radial:
      return Weight::log_radial(n);
    case Weight::Kind::radial_power:
      if (params.size() != 1) {
        throw std::invalid_argument("radial_power expects params = [m]");
      }
      return Weight::radial_power(n, params[0]);
    case Weight::Kind::single_quadratic:
      return Weight::single_quadratic(n);
    case Weight::Kind::aniso_quadratic:
      if (params.size() != n) {
        throw std::invalid_argument(
            "aniso_quadratic expects n coefficients");
      }
      return Weight::aniso_quadratic(params);
    case Weight::Kind::custom:
      break;
  }
  throw std::invalid_argument("custom weights need Weight::custom");
}

double Weight::phi(const Vec& x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::log_radial:
      return dim_ * std::log(radius_guard(x));
    case Kind::radial_power:
      return std::pow(m_ < 2.0 ? radius_guard(x) : x.norm(), m_);
    case Kind::single_quadratic:
      return x[0] * x[0];
    case Kind::aniso_quadratic:
      return (a_.array() * x.array().square()).sum();
    case Kind::custom:
      return phi_(x);
  }
  return 0.0;
}

Vec Weight::grad(const Vec& x) const {
  switch (kind_) {
    case Kind::zero:
      return Vec::Zero(dim_);
    case Kind::log_radial: {
      const double r = radius_guard(x);
      return (dim_ / (r * r)) * x;
    }
    case Kind::radial_power: {
      const double r = m_ < 2.0 ? radius_guard(x) : x.norm();
      if (r == 0.0) return Vec::Zero(dim_);
      return m_ * std::pow(r, m_ - 2.0) * x;
    }
    case Kind::single_quadratic: {
      Vec g = Vec::Zero(dim_);
      g[0] = 2.0 * x[0];
      return g;
    }
    case Kind::aniso_quadratic:
      return 2.0 * (a_.array() * x.array()).matrix();
    case Kind::custom:
      return grad_(x);
  }
  return Vec::Zero(dim_);
}

double Weight::laplacian(const Vec& x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::log_radial: {
      const double r = radius_guard(x);
      return dim_ * (dim_ - 2.0) / (r * r);
    }
    case Kind::radial_power: {
      const double r = m_ < 2.0 ? radius_guard(x) : x.norm();
      return m_ * (m_ + dim_ - 2.0) * std::pow(r, m_ - 2.0);
    }
    case Kind::single_quadratic:
      return 2.0;
    case Kind::aniso_quadratic:
      return 2.0 * a_.sum();
    case Kind::custom:
      return lap_(x);
  }
  return 0.0;
}

Multivector Weight::dirac_phi(const Vec& x) const {
  return Multivector::vector(grad(x));
}

// ---------------------------------------------------------------------------
// Multipliers
// ---------------------------------------------------------------------------

MultiplierChoice normalized_gradient_multiplier(const Weight& w) {
  MultiplierChoice mc;
  mc.eta = [w](const Vec& x) { return -0.5 * w.grad(x).norm(); };
  mc.y = [w](const Vec& x) {
    Vec g = w.grad(x);
    const double gn = g.norm();
    if (gn == 0.0) {
      throw std::domain_error("normalized gradient multiplier at a critical "
                              "point of the weight");
    }
    return Vec(g / gn);
  };
  // eta Y_j = -d_j(phi)/2, so the divergence is -lap(phi)/2.
  mc.div_eta_y = [w](const Vec& x) { return -0.5 * w.laplacian(x); };
  mc.lap_y_sq = [](const Vec&) { return 0.0; };
  return mc;
}

MultiplierChoice radial_multiplier(int n, double m) {
  MultiplierChoice mc;
  mc.eta = [m, n](const Vec& x) {
    const double r = radius_guard(x);
    return -0.5 * m * std::pow(r, m - 1.0) + (2.0 - n) / r;
  };
  mc.y = [](const Vec& x) {
    const double r = radius_guard(x);
    return Vec(x / r);
  };
  // eta Y_j = -d_j(phi)/2 + (2-n) x_j / r^2 with phi = r^m.
  mc.div_eta_y = [m, n](const Vec& x) {
    const double r = radius_guard(x);
    const double lap_phi = m * (m + n - 2.0) * std::pow(r, m - 2.0);
    return -0.5 * lap_phi + (2.0 - n) * (n - 2.0) / (r * r);
  };
  mc.lap_y_sq = [](const Vec&) { return 0.0; };
  return mc;
}

// ---------------------------------------------------------------------------
// PolyMV
// ---------------------------------------------------------------------------

PolyMV::PolyMV(int dim, std::vector<Term> terms)
    : dim_(dim), degree_(0), terms_(std::move(terms)) {
  for (const Term& t : terms_) {
    if (t.exponents.size() != dim_ || t.coeff.dim() != dim_) {
      throw std::invalid_argument("polynomial term dimension mismatch");
    }
    degree_ = std::max(degree_, t.exponents.sum());
  }
}

Multivector PolyMV::eval(const Vec& x) const {
  Multivector out(dim_);
  for (const Term& t : terms_) {
    double mono = 1.0;
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < t.exponents[j]; ++k) mono *= x[j];
    }
    out.coeffs() += mono * t.coeff.coeffs();
  }
  return out;
}

void PolyMV::eval_frame(const Vec& x, FieldFrame& out) const {
  out.u.set_zero();
  for (int j = 0; j < dim_; ++j) out.du[j].set_zero();
  for (const Term& t : terms_) {
    double mono = 1.0;
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < t.exponents[j]; ++k) mono *= x[j];
    }
    out.u.coeffs() += mono * t.coeff.coeffs();
    for (int j = 0; j < dim_; ++j) {
      const int a = t.exponents[j];
      if (a == 0) continue;
      double dmono = a;
      for (int jj = 0; jj < dim_; ++jj) {
        const int p = (jj == j) ? t.exponents[jj] - 1 : t.exponents[jj];
        for (int k = 0; k < p; ++k) dmono *= x[jj];
      }
      out.du[j].coeffs() += dmono * t.coeff.coeffs();
    }
  }
}

CliffordField PolyMV::as_field() const {
  PolyMV self = *this;
  const int n = dim_;
  return CliffordField(
      n, [self](const Vec& x) { return self.eval(x); },
      [self](const Vec& x, FieldFrame& out) { self.eval_frame(x, out); });
}

std::vector<Eigen::VectorXi> PolyMV::monomials(int dim, int degree) {
  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi e = Eigen::VectorXi::Zero(dim);
  // Lexicographic enumeration of compositions of `degree` into dim parts.
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == dim - 1) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[pos] = k;
      rec(pos + 1, left - k);
    }
  };
  rec(0, degree);
  return out;
}

PolyMV PolyMV::random(int dim, int max_degree, Rng& rng) {
  std::vector<Term> terms;
  for (int d = 0; d <= max_degree; ++d) {
    for (const Eigen::VectorXi& e : monomials(dim, d)) {
      Multivector c(dim);
      for (int a = 0; a < c.size(); ++a) c.coeffs()[a] = rng.normal();
      terms.push_back(Term{e, c});
    }
  }
  return PolyMV(dim, std::move(terms));
}

// ---------------------------------------------------------------------------
// Monogenic generation
// ---------------------------------------------------------------------------

MonogenicPolynomial gen_monogenic_poly(int n, int degree,
                                       std::uint64_t seed) {
  if (degree < 0 || degree > 2) {
    throw std::invalid_argument("monogenic generation supports degree <= 2");
  }
  Rng rng(seed);
  const int nb = 1 << n;
  if (degree == 0) {
    Multivector c(n);
    for (int a = 0; a < nb; ++a) c.coeffs()[a] = rng.normal();
    c *= 1.0 / c.norm();
    std::vector<PolyMV::Term> terms{{Eigen::VectorXi::Zero(n), c}};
    return MonogenicPolynomial(PolyMV(n, std::move(terms)), 0);
  }

  const auto exps = PolyMV::monomials(n, degree);
  const auto target_exps = PolyMV::monomials(n, degree - 1);
  auto find_target = [&](const Eigen::VectorXi& e) {
    for (std::size_t i = 0; i < target_exps.size(); ++i) {
      if (target_exps[i] == e) return static_cast<int>(i);
    }
    return -1;
  };

  const int cols = static_cast<int>(exps.size()) * nb;
  const int rows = static_cast<int>(target_exps.size()) * nb;
  Eigen::MatrixXd constraint = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t t = 0; t < exps.size(); ++t) {
    for (int j = 0; j < n; ++j) {
      const int aj = exps[t][j];
      if (aj == 0) continue;
      Eigen::VectorXi shifted = exps[t];
      shifted[j] -= 1;
      const int row_block = find_target(shifted);
      for (int a = 0; a < nb; ++a) {
        const auto [s, c] = basis_product(
            static_cast<BladeIndex>(1u << j), static_cast<BladeIndex>(a), n);
        constraint(row_block * nb + static_cast<int>(c),
                   static_cast<int>(t) * nb + a) += aj * s;
      }
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(constraint);
  lu.setThreshold(1e-10);
  const Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() == 0) {
    throw std::runtime_error("monogenic constraint system has trivial kernel");
  }
  Eigen::VectorXd z(kernel.cols());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  Eigen::VectorXd coeffs = kernel * z;
  coeffs /= coeffs.norm();

  std::vector<PolyMV::Term> terms;
  for (std::size_t t = 0; t < exps.size(); ++t) {
    Multivector c(n);
    c.coeffs() = coeffs.segment(static_cast<int>(t) * nb, nb);
    terms.push_back(PolyMV::Term{exps[t], c});
  }
  return MonogenicPolynomial(PolyMV(n, std::move(terms)), degree);
}

// ---------------------------------------------------------------------------
// Bump fields
// ---------------------------------------------------------------------------

CliffordField bump_field(const Vec& center, double radius,
                         const PolyMV& amplitude) {
  if (radius <= 0.0) {
    throw std::invalid_argument("bump radius must be positive");
  }
  const int n = amplitude.dim();
  const Vec c = center;
  const double rho2 = radius * radius;
  const PolyMV poly = amplitude;

  auto eval = [c, rho2, poly, n](const Vec& x) {
    const double t2 = (x - c).squaredNorm() / rho2;
    if (t2 >= 1.0) return Multivector(n);
    const double b = std::exp(-1.0 / (1.0 - t2));
    Multivector out = poly.eval(x);
    out *= b;
    return out;
  };
  auto frame = [c, rho2, poly, n](const Vec& x, FieldFrame& out) {
    const Vec d = x - c;
    const double t2 = d.squaredNorm() / rho2;
    if (t2 >= 1.0) {
      out.u.set_zero();
      for (int j = 0; j < n; ++j) out.du[j].set_zero();
      return;
    }
    const double s = 1.0 - t2;
    const double b = std::exp(-1.0 / s);
    poly.eval_frame(x, out);
    // d_j u = b * (dP_j - 2 d_j/(rho^2 s^2) * P)
    const double fac = -2.0 / (rho2 * s * s);
    for (int j = 0; j < n; ++j) {
      out.du[j].coeffs() =
          b * (out.du[j].coeffs() + (fac * d[j]) * out.u.coeffs());
    }
    out.u.coeffs() *= b;
  };
  return CliffordField(n, std::move(eval), std::move(frame))
      .with_support(center, radius);
}

CliffordField random_bump_field(const Vec& center, double radius,
                                int max_degree, std::uint64_t seed) {
  Rng rng(seed);
  const int n = static_cast<int>(center.size());
  return bump_field(center, radius, PolyMV::random(n, max_degree, rng));
}

// ---------------------------------------------------------------------------
// Kelvin transform
// ---------------------------------------------------------------------------

CliffordField kelvin(const CliffordField& g) {
  const int n = g.dim();
  const CliffordField inner_g = g;

  auto eval = [inner_g, n](const Vec& x) {
    const double r = radius_guard(x);
    const double rn = std::pow(r, n);
    const Vec y = x / (r * r);
    Multivector jx = Multivector::vector(x);
    jx *= 1.0 / rn;
    return gmul(jx, inner_g(y));
  };

  if (!g.has_analytic_partials()) {
    return CliffordField(n, std::move(eval));
  }

  auto frame = [inner_g, n](const Vec& x, FieldFrame& out) {
    const double r = radius_guard(x);
    const double r2 = r * r;
    const double rn = std::pow(r, n);
    const Vec y = x / r2;

    FieldFrame gf(n);
    inner_g.eval_frame(y, gf);

    const Multivector xv = Multivector::vector(x);
    Multivector jx = xv;
    jx *= 1.0 / rn;
    gmul_into(jx, gf.u, out.u);

    Multivector tmp(n);
    Vec dyi(n);
    for (int i = 0; i < n; ++i) {
      // d_i J = e_i r^{-n} - n x_i r^{-n-2} x
      Multivector dj = Multivector::basis(n, 1u << i);
      dj *= 1.0 / rn;
      Multivector corr = xv;
      corr *= n * x[i] / (rn * r2);
      dj -= corr;
      gmul_into(dj, gf.u, out.du[i]);
      // J * sum_j (d y_j / d x_i) g_j(y)
      Multivector chain(n);
      for (int j = 0; j < n; ++j) {
        const double dyj =
            (i == j ? 1.0 / r2 : 0.0) - 2.0 * x[i] * x[j] / (r2 * r2);
        chain.coeffs() += dyj * gf.du[j].coeffs();
      }
      gmul_into(jx, chain, tmp);
      out.du[i] += tmp;
    }
  };
  return CliffordField(n, std::move(eval), std::move(frame));
}

CliffordField coordinate_field(int n) {
  auto eval = [n](const Vec& x) { return Multivector::vector(x); };
  auto frame = [n](const Vec& x, FieldFrame& out) {
    out.u = Multivector::vector(x);
    for (int j = 0; j < n; ++j) {
      out.du[j].set_zero();
      out.du[j][static_cast<BladeIndex>(1u << j)] = 1.0;
    }
  };
  return CliffordField(n, std::move(eval), std::move(frame));
}

CliffordField smooth_probe_field(int n, std::uint64_t seed) {
  Rng rng(seed);
  const PolyMV poly = PolyMV::random(n, 2, rng);
  auto eval = [poly](const Vec& x) {
    Multivector out = poly.eval(x);
    out *= std::exp(-0.5 * x.squaredNorm());
    return out;
  };
  auto frame = [poly, n](const Vec& x, FieldFrame& out) {
    poly.eval_frame(x, out);
    const double e = std::exp(-0.5 * x.squaredNorm());
    for (int j = 0; j < n; ++j) {
      out.du[j].coeffs() = e * (out.du[j].coeffs() - x[j] * out.u.coeffs());
    }
    out.u.coeffs() *= e;
  };
  return CliffordField(n, std::move(eval), std::move(frame));
}

CliffordField constant_field(const Multivector& c) {
  const int n = c.dim();
  const Multivector value = c;
  auto eval = [value](const Vec&) { return value; };
  auto frame = [value, n](const Vec&, FieldFrame& out) {
    out.u = value;
    for (int j = 0; j < n; ++j) out.du[j].set_zero();
  };
  return CliffordField(n, std::move(eval), std::move(frame));
}

}  // namespace diraclab
