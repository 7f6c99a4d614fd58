#pragma once

#include "diraclab/fields.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace diraclab {

/// Nodes/weights of a 1-D rule.
struct Rule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre on [-1, 1].
Rule1D gauss_legendre(int n);

/// Gauss-Jacobi with symmetric weight (1 - t^2)^mu on [-1, 1], mu > -1.
/// Golub-Welsch on the Jacobi recurrence.
Rule1D gauss_jacobi_sym(int n, double mu);

/// Surface area sigma_{n-1} = 2 pi^{n/2} / Gamma(n/2) of the unit sphere.
double sphere_area(int n);

struct SphereRule {
  Eigen::MatrixXd nodes;  // rows are unit vectors
  Eigen::VectorXd weights;
};

/// Quadrature on S^{n-1} exact for polynomials of degree <= level.
/// n = 2: uniform trapezoid on the circle. n >= 3: product rule over the
/// polar angles (Gauss-Jacobi in cos(theta) with the sin-power Jacobian
/// absorbed into the weight) times uniform azimuth.
SphereRule sphere_rule(int n, int level);

struct Domain {
  enum class Kind { annulus, box, exterior_truncated, ball };

  Kind kind;
  int dim = 0;
  double r0 = 0.0, r1 = 0.0;  // radial bounds (annulus/exterior/ball)
  Vec lo, hi;                 // box corners
  Vec center;                 // ball center
  double tail_bound = 0.0;    // certified truncation error (exterior only)

  static Domain annulus(int n, double r0, double r1);
  static Domain box(Vec lo, Vec hi);
  static Domain exterior_truncated(int n, double r0, double R,
                                   double tail_bound = 0.0);
  static Domain ball(Vec center, double radius);

  bool contains_ball(const SupportBall& b) const;
};

struct QuadratureSpec {
  int radial_nodes = 48;  // Gauss-Legendre nodes per radial panel
  int sphere_level = 20;
  int box_nodes = 32;  // per-axis nodes for box domains

  static QuadratureSpec defaults() { return {}; }

  /// One rule level down; used for the embedded error estimate.
  QuadratureSpec coarser() const {
    QuadratureSpec c = *this;
    c.radial_nodes = std::max(8, (2 * radial_nodes) / 3);
    c.sphere_level = std::max(4, sphere_level - 6);
    c.box_nodes = std::max(6, (2 * box_nodes) / 3);
    return c;
  }
};

/// Flattened node/weight set in a fixed deterministic order.
struct QuadGrid {
  Eigen::MatrixXd points;  // N x n
  Eigen::VectorXd weights;

  std::int64_t size() const { return points.rows(); }
};

QuadGrid build_grid(const Domain& dom, const QuadratureSpec& q);

struct IntegralValue {
  double value = 0.0;
  double est_error = 0.0;
  std::int64_t nodes_used = 0;
};

/// Cascade (pairwise) accumulator: deterministic summation order, bit-exact
/// across runs for identical input sequences.
class PairwiseAccumulator {
 public:
  void add(double x) {
    std::uint64_t mask = count_;
    int level = 0;
    while (mask & 1u) {
      x += partial_[level];
      mask >>= 1;
      ++level;
    }
    if (level >= static_cast<int>(partial_.size())) {
      partial_.push_back(x);
    } else {
      partial_[static_cast<std::size_t>(level)] = x;
    }
    ++count_;
  }

  double total() const {
    double s = 0.0;
    std::uint64_t mask = count_;
    for (int level = 0; mask != 0; ++level, mask >>= 1) {
      if (mask & 1u) s += partial_[static_cast<std::size_t>(level)];
    }
    return s;
  }

  void reset() {
    partial_.clear();
    count_ = 0;
  }

 private:
  std::vector<double> partial_;
  std::uint64_t count_ = 0;
};

double pairwise_sum(const double* data, std::int64_t size);

/// Integral of a scalar function over the grid (pairwise summation).
double integrate_on(const QuadGrid& grid,
                    const std::function<double(const Vec&)>& f);

/// Integral with embedded error estimate from the next-lower rule level.
IntegralValue integrate(const Domain& dom, const QuadratureSpec& q,
                        const std::function<double(const Vec&)>& f);

/// <u, v>_phi = int Re(u conj(v)) e^{-phi} dV over the domain.
IntegralValue weighted_inner(const CliffordField& u, const CliffordField& v,
                             const Weight& w, const Domain& dom,
                             const QuadratureSpec& q);

IntegralValue weighted_norm_sq(const CliffordField& u, const Weight& w,
                               const Domain& dom, const QuadratureSpec& q);

/// Smallest radius R >= r0 (rounded up to an integer) such that the
/// closed-form bound for int_R^inf r^{decay_exponent + n - 1} e^{-phi} dr
/// drops below tol. Throws if the tail is not integrable.
double truncation_radius(const Weight& w, double decay_exponent, double tol,
                         double r0 = 1.0);

enum class RadialShape { power, power_times_gaussian };

/// Exact radial integral int_a^b r^p dr or int_a^b r^p e^{-r^2} dr
/// (b may be infinite when the integral converges).
double closed_form_radial(RadialShape shape, double p, double a, double b);

}  // namespace diraclab
