#pragma once

#include "diraclab/quadrature.hpp"

#include <cstdint>

namespace diraclab {

/// Closed forms and quadrature cross-checks for the exterior-domain
/// counterexample with weight phi = n log|x| and data u_m = |x|^{-1/m}.
struct ObstructionResult {
  int n = 0;
  int m = 0;
  double norm_u_sq = 0.0;            // (m/2) sigma_{n-1}
  double weighted_f_integral = 0.0;  // sigma_{n-1} / (2 m n (n-2))
  double ratio = 0.0;                // m^2 n (n-2)
  double quad_norm_u_sq = 0.0;
  double quad_weighted_f = 0.0;
  double rel_err_u = 0.0;
  double rel_err_f = 0.0;
  double pointwise_dirac_residual = 0.0;  // max |Du_m - f_m| over samples
  double truncation_R = 0.0;
};

/// u_m = |x|^{-1/m} with analytic partials.
CliffordField obstruction_u(int n, int m);

/// f_m = D u_m = -(1/m) |x|^{-1/m-2} x.
CliffordField obstruction_f(int n, int m);

/// Exact norms and the ratio m^2 n (n-2); rejects n = 2 where the weight
/// Laplacian vanishes and the construction degenerates.
ObstructionResult counterexample_norms(int n, int m);

/// Recomputes both integrals by truncated exterior quadrature (or, for
/// m >= 10, by the compactifying substitution t = r^{-2/m}) and checks
/// Du_m = f_m pointwise at seeded random points with 1 < |x| < 5.
ObstructionResult counterexample_quadrature_crosscheck(int n, int m,
                                                       double tol,
                                                       std::uint64_t seed = 1);

/// Kelvin transform of a monogenic polynomial together with its degree
/// (an outer spherical monogenic, decaying like r^{-(n+d-1)}).
struct OuterMonogenic {
  CliffordField field;
  int poly_degree = 0;
};

OuterMonogenic make_outer_monogenic(const MonogenicPolynomial& p);

/// Throws when the field grows with radius (a polynomial part, which is not
/// weighted-integrable on the exterior domain).
void require_weighted_integrable(const CliffordField& h, int n);

/// Normalized pairing |<u_m, h>_phi| / (||u_m||_phi ||h||_phi) on the
/// exterior domain; vanishes for outer monogenics.
double orthogonality_pairing(int n, int m, const OuterMonogenic& h,
                             double tol = 1e-9);

/// |int_{S^{n-1}} Re(h(r omega)) dS| by the sphere rule.
double spherical_mean(const CliffordField& h, double r, int level = 12);

}  // namespace diraclab
