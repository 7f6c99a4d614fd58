#pragma once

#include "diraclab/multivector.hpp"
#include "diraclab/rng.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace diraclab {

using Vec = Eigen::VectorXd;

struct SupportBall {
  Vec center;
  double radius = 0.0;
};

/// Value and first partials of a Clifford-valued function at one point.
/// Reused across quadrature nodes to keep hot loops allocation-free.
struct FieldFrame {
  Multivector u;
  std::vector<Multivector> du;  // du[j-1] = d u / d x_j

  explicit FieldFrame(int dim) : u(dim), du(dim, Multivector(dim)) {}
};

/// A Clifford-valued function of x in R^n. Immutable record of pure
/// evaluators; safe to evaluate concurrently. Partials are analytic when the
/// constructor supplies a frame evaluator, otherwise central finite
/// differences with step max(1,|x|) * eps^{1/3}.
class CliffordField {
 public:
  using Eval = std::function<Multivector(const Vec&)>;
  using FrameEval = std::function<void(const Vec&, FieldFrame&)>;

  CliffordField(int dim, Eval eval);
  CliffordField(int dim, Eval eval, FrameEval frame_eval);

  CliffordField with_support(Vec center, double radius) const;

  int dim() const noexcept { return dim_; }
  bool has_analytic_partials() const noexcept {
    return static_cast<bool>(frame_eval_);
  }
  const std::optional<SupportBall>& support() const noexcept {
    return support_;
  }

  Multivector operator()(const Vec& x) const { return eval_(x); }

  /// Value and all first partials at x, written into `out`.
  void eval_frame(const Vec& x, FieldFrame& out) const;

  std::vector<Multivector> partials(const Vec& x) const;

 private:
  int dim_;
  Eval eval_;
  FrameEval frame_eval_;  // empty => finite differences
  std::optional<SupportBall> support_;
};

/// Du = sum_j e_j d_j u evaluated at x.
Multivector dirac(const CliffordField& u, const Vec& x);

/// Same from an already-evaluated frame.
Multivector dirac_from_frame(const FieldFrame& frame);
void dirac_from_frame_into(const FieldFrame& frame, Multivector& out,
                           Multivector& scratch);

/// Scalar weight phi with analytic gradient and Laplacian.
class Weight {
 public:
  enum class Kind {
    zero,
    log_radial,        // phi = n log|x|
    radial_power,      // phi = |x|^m, m != 0
    single_quadratic,  // phi = x_1^2
    aniso_quadratic,   // phi = sum a_i x_i^2, a_i > 0
    custom,
  };

  static Weight zero(int n);
  static Weight log_radial(int n);
  static Weight radial_power(int n, double m);
  static Weight single_quadratic(int n);
  static Weight aniso_quadratic(const Vec& a);
  static Weight custom(int n, std::function<double(const Vec&)> phi,
                       std::function<Vec(const Vec&)> grad,
                       std::function<double(const Vec&)> laplacian);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  /// Radial exponent m (radial_power only).
  double power() const noexcept { return m_; }
  const Vec& aniso_coeffs() const noexcept { return a_; }

  double phi(const Vec& x) const;
  Vec grad(const Vec& x) const;
  double laplacian(const Vec& x) const;

  /// D(phi) = sum_j e_j d_j phi as a pure vector multivector.
  Multivector dirac_phi(const Vec& x) const;

 private:
  Weight(Kind kind, int n) : kind_(kind), dim_(n) {}

  Kind kind_;
  int dim_;
  double m_ = 0.0;
  Vec a_;
  std::function<double(const Vec&)> phi_;
  std::function<Vec(const Vec&)> grad_;
  std::function<double(const Vec&)> lap_;
};

/// Factory over the built-in weight families. `params` is the radial
/// exponent [m] for radial_power and the coefficient vector for
/// aniso_quadratic; ignored otherwise.
Weight weight_builtin(Weight::Kind kind, const Vec& params, int n);

/// delta_phi u = Du - (D phi) u at x.
Multivector adjoint_formal(const CliffordField& u, const Weight& w,
                           const Vec& x);

/// Scalar/vector multiplier pair (eta, Y) for the general weighted identity.
struct MultiplierChoice {
  std::function<double(const Vec&)> eta;
  std::function<Vec(const Vec&)> y;
  /// sum_j d_j(eta Y_j), analytic where available.
  std::optional<std::function<double(const Vec&)>> div_eta_y;
  /// Laplacian of |Y|^2, analytic where available (0 for unit fields).
  std::optional<std::function<double(const Vec&)>> lap_y_sq;
};

/// Y = grad(phi)/|grad(phi)|, eta = -|grad(phi)|/2; div(eta Y) = -lap(phi)/2.
MultiplierChoice normalized_gradient_multiplier(const Weight& w);

/// The radial choice Y = x/|x|, eta = -m r^{m-1}/2 + (2-n)/r used for the
/// weight |x|^m.
MultiplierChoice radial_multiplier(int n, double m);

/// Polynomial with Multivector coefficients, sum_t x^{alpha_t} c_t.
class PolyMV {
 public:
  struct Term {
    Eigen::VectorXi exponents;
    Multivector coeff;
  };

  PolyMV(int dim, std::vector<Term> terms);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  Multivector eval(const Vec& x) const;
  void eval_frame(const Vec& x, FieldFrame& out) const;

  CliffordField as_field() const;

  /// Dense random coefficients over all monomials of degree <= max_degree.
  static PolyMV random(int dim, int max_degree, Rng& rng);

  /// Exponent vectors of all monomials of exact degree `degree`.
  static std::vector<Eigen::VectorXi> monomials(int dim, int degree);

 private:
  int dim_;
  int degree_;
  std::vector<Term> terms_;
};

/// Homogeneous left monogenic polynomial: D P = 0 identically.
class MonogenicPolynomial {
 public:
  MonogenicPolynomial(PolyMV poly, int degree)
      : poly_(std::move(poly)), degree_(degree) {}

  const PolyMV& poly() const noexcept { return poly_; }
  int degree() const noexcept { return degree_; }
  int dim() const noexcept { return poly_.dim(); }

  CliffordField as_field() const { return poly_.as_field(); }

 private:
  PolyMV poly_;
  int degree_;
};

/// Random element of the null space of P -> DP on homogeneous polynomials of
/// the given degree (0, 1 or 2), via exact kernel extraction of the linear
/// constraint system.
MonogenicPolynomial gen_monogenic_poly(int n, int degree, std::uint64_t seed);

/// u(x) = b(|x - center| / radius) * amplitude(x) with
/// b(t) = exp(-1/(1-t^2)) for t < 1 and 0 otherwise; analytic partials,
/// declared support ball.
CliffordField bump_field(const Vec& center, double radius,
                         const PolyMV& amplitude);

/// Bump with seeded random polynomial amplitude of degree <= max_degree.
CliffordField random_bump_field(const Vec& center, double radius,
                                int max_degree, std::uint64_t seed);

/// Kelvin transform (K g)(x) = (x/|x|^n) g(x/|x|^2); carries left monogenic
/// functions across the inversion. Partials by chain rule when g has analytic
/// partials, finite differences otherwise. Throws std::domain_error at x = 0.
CliffordField kelvin(const CliffordField& g);

/// The coordinate field u(x) = x.
CliffordField coordinate_field(int n);

/// Globally analytic probe field: random polynomial of degree <= 2 times the
/// envelope exp(-|x|^2/2), with analytic partials. Derivatives vary on unit
/// scales, which makes it the reference field for discretization-order
/// measurements.
CliffordField smooth_probe_field(int n, std::uint64_t seed);

CliffordField constant_field(const Multivector& c);

}  // namespace diraclab
