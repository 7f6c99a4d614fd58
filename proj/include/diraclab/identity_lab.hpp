#pragma once

#include "diraclab/quadrature.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace diraclab {

/// Outcome of one verified integral identity or inequality: both sides, the
/// labeled term breakdown, residuals, and the embedded quadrature error
/// estimate. Margins carry the coercivity statements attached to a check.
struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double est_error = 0.0;
  std::vector<std::pair<std::string, double>> margins;
  std::int64_t nodes_used = 0;
};

/// Parameter pair of the classical weighted identity; k is determined by
/// kappa through k = (n-2) kappa / (n kappa - (n-2)).
struct KappaK {
  double kappa = 0.0;
  double k = 0.0;

  static KappaK from_kappa(int n, double kappa);

  /// |(k - (n-2)/n)(kappa + k) - k^2|, zero up to rounding by construction.
  double relation_residual(int n) const;
};

/// <delta_phi u, v>_phi = <u, D v>_phi for compactly supported u, v.
IdentityReport check_adjoint_duality(const CliffordField& u,
                                     const CliffordField& v, const Weight& w,
                                     const Domain& dom,
                                     const QuadratureSpec& q);

/// ||delta_phi u||^2 + ||Du||^2 =
///   2 int sum_{j,A} |d_j u_A|^2 e^{-phi} + int lap(phi) |u|^2 e^{-phi}.
IdentityReport check_bochner(const CliffordField& u, const Weight& w,
                             const Domain& dom, const QuadratureSpec& q);

/// The classical weighted identity with parameters (kappa, k); also reports
/// the a priori margin ||delta u||^2 - (1/(1+k)) int (lap phi - kappa
/// |grad phi|^2)|u|^2 e^{-phi} >= -est_error.
IdentityReport check_weighted_identity(const CliffordField& u, const Weight& w,
                                       const KappaK& kk, const Domain& dom,
                                       const QuadratureSpec& q);

struct TraceInequalityResult {
  double min_margin = 0.0;         // min of grad energy - |Du|^2 / n
  double min_scaled_margin = 0.0;  // margin / local gradient scale
};

/// Pointwise sum_{j,A} |d_j u_A|^2 - |Du|^2 / n >= 0 at the sample points.
TraceInequalityResult check_trace_inequality(const CliffordField& u,
                                             const std::vector<Vec>& points);

/// The general weighted identity for the conjugated unknown U = u e^{-phi/2}
/// with multipliers (eta, Y).
IdentityReport check_general_identity(const CliffordField& u, const Weight& w,
                                      const MultiplierChoice& mult,
                                      const Domain& dom,
                                      const QuadratureSpec& q);

/// Radial weight phi = |x|^m:
/// ||delta u||^2 = || |x| D((x/|x|^2) u) ||^2_phi + m^2 int |x|^{m-2} |u|^2.
IdentityReport check_radial_identity(const CliffordField& u, double m,
                                     const Domain& dom,
                                     const QuadratureSpec& q);

/// phi = x_1^2: ||delta u||^2 = ||D(e_1 u)||^2_phi + 2 ||u||^2_phi.
IdentityReport check_single_quadratic(const CliffordField& u,
                                      const Domain& dom,
                                      const QuadratureSpec& q);

/// phi = sum a_i x_i^2 near the Gaussian: margin ||delta u||^2 - 3 ||u||^2.
IdentityReport check_perturbed_coercivity(const CliffordField& u, const Vec& a,
                                          const Domain& dom,
                                          const QuadratureSpec& q);

/// Subharmonic weight with |grad phi| > 0:
/// ||delta u||^2 - ||sum e_j (Dphi/|Dphi|) d_j u||^2_phi =
///   int lap(phi)|u|^2 e^{-phi} + multiplier-derivative terms.
/// Also evaluates the auxiliary inequality margin for (aux_k, aux_eps) and
/// the implied bound ||delta u||^2 >= (eps/(1+k)) int lap(phi)|u|^2 e^{-phi}.
IdentityReport check_general_application(const CliffordField& u,
                                         const Weight& w, const Domain& dom,
                                         const QuadratureSpec& q,
                                         double aux_k = 1.0,
                                         double aux_eps = 0.5);

/// n = 2 identity: ||delta u||^2 =
///   int |(e_1 d_1 - e_2 d_2) u|^2 e^{-phi} + int lap(phi)|u|^2 e^{-phi}.
IdentityReport check_apriori_2d(const CliffordField& u, const Weight& w,
                                const Domain& dom, const QuadratureSpec& q);

enum class IdentityKind {
  adjoint,
  bochner,
  weighted,
  general,
  radial,
  quadratic,
  perturbed,
  subharmonic,
  apriori2d,
};

const char* identity_kind_name(IdentityKind kind);

struct TrialParams {
  int bump_degree = 2;
  double kappa = 1.0;    // weighted identity
  double aux_k = 1.0;    // subharmonic auxiliary constants
  double aux_eps = 0.5;
};

/// Runs `trials` seeded random bump fields through one identity check.
/// Each trial draws its own seed from the master seed by counter, so reports
/// are reproducible independently of execution order; entries are ordered by
/// trial index.
std::vector<IdentityReport> run_identity_trials(
    IdentityKind kind, const Weight& w, const Domain& dom,
    const QuadratureSpec& q, int trials, std::uint64_t seed,
    const TrialParams& params = {});

/// A random bump support ball strictly inside the domain.
SupportBall random_ball_in(const Domain& dom, Rng& rng);

}  // namespace diraclab
