#pragma once

#include "diraclab/identity_lab.hpp"
#include "diraclab/quadrature.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

namespace diraclab {

/// Uniform cell-centered grid over a bounding box with an active-cell mask
/// (all cells for boxes, r0 <= |center| <= r1 for annulus shells).
struct Grid {
  int dim = 0;
  Vec lo, hi;
  double h = 0.0;
  Eigen::VectorXi cells_per_axis;
  std::vector<std::int32_t> cell_to_active;   // flat cell -> active id or -1
  std::vector<Eigen::VectorXi> active_cells;  // active id -> cell coords

  static Grid box(int n, const Vec& lo, const Vec& hi, int cells_per_axis);
  static Grid annulus_shell(int n, double r0, double r1, int cells_per_axis,
                            double margin = 0.2);

  std::int64_t active_count() const {
    return static_cast<std::int64_t>(active_cells.size());
  }
  Vec cell_center(const Eigen::VectorXi& coords) const;
  /// True when every neighbor within `width` cells along each axis is active.
  bool is_interior(const Eigen::VectorXi& coords, int width = 1) const;
};

/// Sparse discrete Dirac operator on grid functions valued in R_n
/// (layout: active cell index major, blade index minor), with the weighted
/// mass matrix W = diag(e^{-phi(x_cell)} h^n) replicated across components.
struct DiscreteDirac {
  int dim = 0;
  int blades = 0;
  Eigen::SparseMatrix<double> a;    // (active * 2^n)^2
  Eigen::SparseMatrix<double> at;   // transpose, stored explicitly
  Eigen::VectorXd w_diag;
  Grid grid;
};

/// Central differences in the interior, one-sided second order at mask
/// boundaries; the Clifford structure enters through the constant e_j blocks.
DiscreteDirac discretize_dirac(const Grid& grid, const Weight& w);

/// Samples a field on the active cells in the discrete layout.
Eigen::VectorXd sample_field(const Grid& grid, const CliffordField& u);

/// Pointwise Dirac of a smooth field on the active cells (reference values
/// for consistency tests).
Eigen::VectorXd sample_dirac(const Grid& grid, const CliffordField& u);

struct SolveReport {
  double residual = 0.0;         // ||A u - f||_W / ||f||_W
  double normal_residual = 0.0;  // ||B^T r|| / (||B|| ||r||), scaled system
  double norm_ratio = 0.0;       // ||u||_W^2 / ||f||_W^2
  int iterations = 0;
  double grid_h = 0.0;
  double bound_expected = 0.0;
  bool converged = false;        // either stopping rule triggered
  bool consistent = false;       // the residual target itself was reached
};

enum class StoppingPolicy {
  exact,          // run to the residual or normal-equations target
  least_squares,  // additionally stop at the residual plateau (discrepancy
                  // principle) for data outside the discrete range
};

/// Weighted minimal-norm solution of A u = f: minimizes u^T W u subject to
/// the constraint, via Golub-Kahan bidiagonalization (LSQR) on the
/// row-equilibrated system A W^{-1/2} y = f, u = W^{-1/2} y. Row scaling
/// leaves the constraint set and hence the minimizer unchanged.
std::pair<Eigen::VectorXd, SolveReport> minimal_norm_solve(
    const DiscreteDirac& op, const Eigen::VectorXd& f, double bound_expected,
    double rel_tol = 1e-10,
    StoppingPolicy policy = StoppingPolicy::exact);

/// Poisson composition: solve Dv = f, then Dw = -v; u = w satisfies
/// Delta u = f through the factorization Delta = -D^2. Also reports the
/// compact discrete Laplacian residual on interior cells.
struct PoissonReport {
  SolveReport first;
  SolveReport second;
  double norm_ratio = 0.0;  // ||u||_W^2 / ||f||_W^2
  double bound_expected = 0.0;
  double laplacian_residual = 0.0;  // ||Lap_h u - f||_W / ||f||_W, interior
};
std::pair<Eigen::VectorXd, PoissonReport> poisson_solve(
    const DiscreteDirac& op, const Eigen::VectorXd& f, double bound_expected,
    double rel_tol = 1e-10);

/// Compact 3-point discrete Laplacian per component applied to a grid
/// function; rows touching the mask boundary are left as zero.
Eigen::VectorXd apply_compact_laplacian(const Grid& grid,
                                        const Eigen::VectorXd& u);

/// Max norm of (A u - pointwise Du) over cells interior by `width`.
double dirac_consistency_error(const DiscreteDirac& op,
                               const CliffordField& u, int width = 2);

/// Root-mean-square of the same consistency defect over interior cells; the
/// metric used for Richardson order measurements.
double dirac_consistency_rms(const DiscreteDirac& op, const CliffordField& u,
                             int width = 2);

/// Cutoff-sequence ratios ||w_m||_phi^2 / ||delta_phi w_m||_phi^2 for
/// w_m = chi_m x with the Gaussian weight; approaches 1/4 from below.
struct SharpnessResult {
  std::vector<int> m_values;
  std::vector<double> ratios;
  double norm_x_sq_quad = 0.0;
  double norm_x_sq_closed = 0.0;   // sigma_{n-1} Gamma(n/2+1) / 2
  double norm_u0_sq_quad = 0.0;
  double norm_u0_sq_closed = 0.0;  // 4 ||x||^2
};
SharpnessResult sharpness_sequence(int n, const std::vector<int>& m_values,
                                   int radial_nodes = 64);

}  // namespace diraclab
