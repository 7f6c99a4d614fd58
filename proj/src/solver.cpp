#include "diraclab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace diraclab {

namespace {

std::int64_t flat_index(const Eigen::VectorXi& coords,
                        const Eigen::VectorXi& dims) {
  std::int64_t idx = 0;
  for (int j = 0; j < dims.size(); ++j) {
    idx = idx * dims[j] + coords[j];
  }
  return idx;
}

// Quintic smoothstep and its derivative.
double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep5_prime(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

}  // namespace

Grid Grid::box(int n, const Vec& lo, const Vec& hi, int cells_per_axis) {
  if (cells_per_axis < 3) {
    throw std::invalid_argument("grid needs at least 3 cells per axis");
  }
  Grid g;
  g.dim = n;
  g.lo = lo;
  g.hi = hi;
  g.cells_per_axis = Eigen::VectorXi::Constant(n, cells_per_axis);
  g.h = (hi[0] - lo[0]) / cells_per_axis;
  std::int64_t total = 1;
  for (int j = 0; j < n; ++j) total *= cells_per_axis;
  g.cell_to_active.assign(static_cast<std::size_t>(total), -1);
  Eigen::VectorXi c = Eigen::VectorXi::Zero(n);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    g.cell_to_active[static_cast<std::size_t>(flat)] =
        static_cast<std::int32_t>(g.active_cells.size());
    g.active_cells.push_back(c);
    int j = n - 1;
    while (j >= 0 && ++c[j] == cells_per_axis) c[j--] = 0;
  }
  return g;
}

Grid Grid::annulus_shell(int n, double r0, double r1, int cells_per_axis,
                         double margin) {
  if (!(0.0 < r0 && r0 < r1)) {
    throw std::invalid_argument("annulus shell requires 0 < r0 < r1");
  }
  if (cells_per_axis < 3) {
    throw std::invalid_argument("grid needs at least 3 cells per axis");
  }
  Grid g;
  g.dim = n;
  const double half = r1 + margin;
  g.lo = Vec::Constant(n, -half);
  g.hi = Vec::Constant(n, half);
  g.cells_per_axis = Eigen::VectorXi::Constant(n, cells_per_axis);
  g.h = 2.0 * half / cells_per_axis;
  std::int64_t total = 1;
  for (int j = 0; j < n; ++j) total *= cells_per_axis;
  g.cell_to_active.assign(static_cast<std::size_t>(total), -1);
  Eigen::VectorXi c = Eigen::VectorXi::Zero(n);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    const double r = g.cell_center(c).norm();
    if (r >= r0 && r <= r1) {
      g.cell_to_active[static_cast<std::size_t>(flat)] =
          static_cast<std::int32_t>(g.active_cells.size());
      g.active_cells.push_back(c);
    }
    int j = n - 1;
    while (j >= 0 && ++c[j] == cells_per_axis) c[j--] = 0;
  }
  if (g.active_cells.empty()) {
    throw std::invalid_argument("annulus shell mask is empty at this spacing");
  }
  return g;
}

Vec Grid::cell_center(const Eigen::VectorXi& coords) const {
  Vec x(dim);
  for (int j = 0; j < dim; ++j) x[j] = lo[j] + (coords[j] + 0.5) * h;
  return x;
}

bool Grid::is_interior(const Eigen::VectorXi& coords, int width) const {
  // Full Chebyshev ball: composed stencils (A^2) reach diagonal neighbors,
  // so axis neighbors alone do not guarantee central differences throughout.
  Eigen::VectorXi c = coords;
  std::int64_t count = 1;
  for (int j = 0; j < dim; ++j) count *= 2 * width + 1;
  for (std::int64_t k = 0; k < count; ++k) {
    std::int64_t rem = k;
    bool in_range = true;
    for (int j = 0; j < dim; ++j) {
      const int offset = static_cast<int>(rem % (2 * width + 1)) - width;
      rem /= 2 * width + 1;
      c[j] = coords[j] + offset;
      if (c[j] < 0 || c[j] >= cells_per_axis[j]) {
        in_range = false;
        break;
      }
    }
    if (!in_range) return false;
    if (cell_to_active[static_cast<std::size_t>(
            flat_index(c, cells_per_axis))] < 0) {
      return false;
    }
  }
  return true;
}

DiscreteDirac discretize_dirac(const Grid& grid, const Weight& w) {
  const int n = grid.dim;
  const int nb = 1 << n;
  const std::int64_t nact = grid.active_count();
  for (int ax = 0; ax < n; ++ax) {
    if (grid.cells_per_axis[ax] < 3) {
      throw std::invalid_argument("fewer than 3 cells along an active axis");
    }
  }

  auto active_at = [&](Eigen::VectorXi c) -> std::int64_t {
    for (int j = 0; j < n; ++j) {
      if (c[j] < 0 || c[j] >= grid.cells_per_axis[j]) return -1;
    }
    return grid.cell_to_active[static_cast<std::size_t>(
        flat_index(c, grid.cells_per_axis))];
  };

  // Stencil of the scalar derivative along each axis per active cell.
  struct Entry {
    std::int64_t cell;
    double value;
  };
  const double h = grid.h;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nact) * nb * (2 * n + 1));

  const std::int8_t* signs = blade_sign_table(n);
  for (std::int64_t a = 0; a < nact; ++a) {
    const Eigen::VectorXi& c0 = grid.active_cells[static_cast<std::size_t>(a)];
    for (int ax = 0; ax < n; ++ax) {
      Eigen::VectorXi c = c0;
      auto nb_at = [&](int step) {
        c[ax] = c0[ax] + step;
        const std::int64_t id = active_at(c);
        c[ax] = c0[ax];
        return id;
      };
      const std::int64_t plus = nb_at(1);
      const std::int64_t minus = nb_at(-1);
      std::vector<Entry> stencil;
      if (plus >= 0 && minus >= 0) {
        stencil = {{plus, 0.5 / h}, {minus, -0.5 / h}};
      } else if (plus >= 0) {
        const std::int64_t plus2 = nb_at(2);
        if (plus2 >= 0) {
          stencil = {{a, -1.5 / h}, {plus, 2.0 / h}, {plus2, -0.5 / h}};
        } else {
          stencil = {{a, -1.0 / h}, {plus, 1.0 / h}};
        }
      } else if (minus >= 0) {
        const std::int64_t minus2 = nb_at(-2);
        if (minus2 >= 0) {
          stencil = {{a, 1.5 / h}, {minus, -2.0 / h}, {minus2, 0.5 / h}};
        } else {
          stencil = {{a, 1.0 / h}, {minus, -1.0 / h}};
        }
      } else {
        continue;  // isolated along this axis; derivative dropped
      }
      // Left multiplication by e_{ax+1}: component B feeds component ej ^ B
      // with the blade-product sign.
      const BladeIndex ej = static_cast<BladeIndex>(1u << ax);
      for (int b = 0; b < nb; ++b) {
        const double s = signs[static_cast<std::size_t>(ej) * nb + b];
        const std::int64_t row = a * nb + static_cast<std::int64_t>(ej ^ b);
        for (const Entry& e : stencil) {
          triplets.emplace_back(static_cast<int>(row),
                                static_cast<int>(e.cell * nb + b),
                                s * e.value);
        }
      }
    }
  }

  DiscreteDirac op;
  op.dim = n;
  op.blades = nb;
  op.grid = grid;
  op.a.resize(static_cast<int>(nact * nb), static_cast<int>(nact * nb));
  op.a.setFromTriplets(triplets.begin(), triplets.end());
  op.a.makeCompressed();
  op.at = op.a.transpose();
  op.at.makeCompressed();

  op.w_diag.resize(nact * nb);
  const double cell_volume = std::pow(h, n);
  for (std::int64_t a = 0; a < nact; ++a) {
    const double wv =
        std::exp(-w.phi(grid.cell_center(
            grid.active_cells[static_cast<std::size_t>(a)]))) *
        cell_volume;
    for (int b = 0; b < nb; ++b) op.w_diag[a * nb + b] = wv;
  }
  return op;
}

Eigen::VectorXd sample_field(const Grid& grid, const CliffordField& u) {
  const int nb = 1 << grid.dim;
  Eigen::VectorXd out(grid.active_count() * nb);
  for (std::int64_t a = 0; a < grid.active_count(); ++a) {
    const Multivector v =
        u(grid.cell_center(grid.active_cells[static_cast<std::size_t>(a)]));
    out.segment(a * nb, nb) = v.coeffs();
  }
  return out;
}

Eigen::VectorXd sample_dirac(const Grid& grid, const CliffordField& u) {
  const int nb = 1 << grid.dim;
  Eigen::VectorXd out(grid.active_count() * nb);
  for (std::int64_t a = 0; a < grid.active_count(); ++a) {
    const Multivector v = dirac(
        u, grid.cell_center(grid.active_cells[static_cast<std::size_t>(a)]));
    out.segment(a * nb, nb) = v.coeffs();
  }
  return out;
}

std::pair<Eigen::VectorXd, SolveReport> minimal_norm_solve(
    const DiscreteDirac& op, const Eigen::VectorXd& f, double bound_expected,
    double rel_tol, StoppingPolicy policy) {
  const std::int64_t m = op.a.rows();
  SolveReport report;
  report.grid_h = op.grid.h;
  report.bound_expected = bound_expected;

  const Eigen::VectorXd wsqrt_inv =
      op.w_diag.array().sqrt().inverse().matrix();

  // Row norms of B = A W^{-1/2} for equilibration (allowed: row scaling
  // preserves the constraint set and the minimizer).
  Eigen::VectorXd row_norm_sq = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < op.at.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.at, k); it; ++it) {
      // at(row=col of a, col=row of a)
      const double v = it.value() * wsqrt_inv[it.row()];
      row_norm_sq[it.col()] += v * v;
    }
  }
  Eigen::VectorXd row_scale = row_norm_sq.array().sqrt().matrix();
  for (std::int64_t i = 0; i < m; ++i) {
    if (row_scale[i] <= 0.0) row_scale[i] = 1.0;
  }
  const Eigen::VectorXd row_scale_inv = row_scale.array().inverse().matrix();

  auto apply_b = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return row_scale_inv.asDiagonal() *
           (op.a * (wsqrt_inv.asDiagonal() * y));
  };
  auto apply_bt = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return wsqrt_inv.asDiagonal() *
           (op.at * (row_scale_inv.asDiagonal() * r));
  };

  const Eigen::VectorXd b = row_scale_inv.asDiagonal() * f;
  const double bnorm = b.norm();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (bnorm == 0.0) {
    report.converged = true;
    report.residual = 0.0;
    report.norm_ratio = 0.0;
    return {y, report};
  }

  // LSQR (Paige & Saunders) on B y = b. For consistent data the estimated
  // residual phibar reaches the target; otherwise the normal-equations
  // criterion stops at the minimum-norm least-squares solution.
  Eigen::VectorXd u = b / bnorm;
  double beta = bnorm;
  Eigen::VectorXd v = apply_bt(u);
  double alpha = v.norm();
  if (alpha == 0.0) {
    // data orthogonal to the range: the least-squares minimizer is zero
    report.residual = 1.0;
    report.normal_residual = 0.0;
    report.converged = true;
    return {Eigen::VectorXd::Zero(m), report};
  }
  v /= alpha;
  Eigen::VectorXd search = v;
  double phibar = beta;
  double rhobar = alpha;
  double bbnorm_sq = alpha * alpha;  // running estimate of ||B||_F^2
  double normal_res = 1.0;
  const double normal_tol = 1e-13;
  // Discrepancy plateau: once the residual estimate stops improving, the
  // remaining defect is the distance of the data from the discrete range;
  // iterating further only grows the solution along near-null directions.
  const int plateau_window = 100;
  double plateau_ref = phibar;
  bool plateaued = false;

  const std::int64_t max_iter = 10 * m;
  std::int64_t iter = 0;
  for (; iter < max_iter; ++iter) {
    u = apply_b(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;
    v = apply_bt(u) - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;
    bbnorm_sq += alpha * alpha + beta * beta;

    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    y += (phi / rho) * search;
    search = v - (theta / rho) * search;

    // ||B^T r|| = phibar * alpha * |c|
    normal_res = phibar * alpha * std::abs(c) /
                 std::max(std::sqrt(bbnorm_sq) * phibar, 1e-300);
    if (phibar <= rel_tol * bnorm || normal_res <= normal_tol) {
      ++iter;
      break;
    }
    if (policy == StoppingPolicy::least_squares &&
        (iter + 1) % plateau_window == 0) {
      if (phibar > plateau_ref * (1.0 - 1e-4)) {
        plateaued = true;
        ++iter;
        break;
      }
      plateau_ref = phibar;
    }
  }
  report.iterations = static_cast<int>(iter);
  report.consistent = phibar <= rel_tol * bnorm;
  report.normal_residual = normal_res;
  report.converged =
      report.consistent || normal_res <= normal_tol || plateaued;

  Eigen::VectorXd solution = wsqrt_inv.asDiagonal() * y;
  const Eigen::VectorXd resid = op.a * solution - f;
  const double fw = std::sqrt(f.dot(op.w_diag.asDiagonal() * f));
  report.residual =
      fw > 0.0 ? std::sqrt(resid.dot(op.w_diag.asDiagonal() * resid)) / fw
               : 0.0;
  report.norm_ratio =
      fw > 0.0 ? solution.dot(op.w_diag.asDiagonal() * solution) / (fw * fw)
               : 0.0;
  return {std::move(solution), report};
}

Eigen::VectorXd apply_compact_laplacian(const Grid& grid,
                                        const Eigen::VectorXd& u) {
  const int n = grid.dim;
  const int nb = 1 << n;
  const double h2 = grid.h * grid.h;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());

  auto active_at = [&](Eigen::VectorXi c) -> std::int64_t {
    for (int j = 0; j < n; ++j) {
      if (c[j] < 0 || c[j] >= grid.cells_per_axis[j]) return -1;
    }
    return grid.cell_to_active[static_cast<std::size_t>(
        flat_index(c, grid.cells_per_axis))];
  };

  for (std::int64_t a = 0; a < grid.active_count(); ++a) {
    const Eigen::VectorXi& c0 = grid.active_cells[static_cast<std::size_t>(a)];
    if (!grid.is_interior(c0, 1)) continue;
    for (int ax = 0; ax < n; ++ax) {
      Eigen::VectorXi c = c0;
      c[ax] = c0[ax] + 1;
      const std::int64_t plus = active_at(c);
      c[ax] = c0[ax] - 1;
      const std::int64_t minus = active_at(c);
      for (int b = 0; b < nb; ++b) {
        out[a * nb + b] += (u[plus * nb + b] - 2.0 * u[a * nb + b] +
                            u[minus * nb + b]) /
                           h2;
      }
    }
  }
  return out;
}

std::pair<Eigen::VectorXd, PoissonReport> poisson_solve(
    const DiscreteDirac& op, const Eigen::VectorXd& f, double bound_expected,
    double rel_tol) {
  PoissonReport report;
  report.bound_expected = bound_expected;
  auto [v, first] = minimal_norm_solve(op, f, 0.0, rel_tol);
  report.first = first;
  // The composed data -v generally falls outside the discrete range by a
  // truncation-order defect; the second leg is a regularized least-squares
  // solve stopped at the residual plateau.
  auto [u, second] = minimal_norm_solve(op, Eigen::VectorXd(-v), 0.0, rel_tol,
                                        StoppingPolicy::least_squares);
  report.second = second;

  const double fw2 = f.dot(op.w_diag.asDiagonal() * f);
  report.norm_ratio =
      fw2 > 0.0 ? u.dot(op.w_diag.asDiagonal() * u) / fw2 : 0.0;

  // Interior compact-Laplacian consistency: Lap_h u vs f (second-order gap
  // against the wide stencil -A^2 that the composition inverts).
  const Eigen::VectorXd lap = apply_compact_laplacian(op.grid, u);
  const int nb = op.blades;
  double num = 0.0, den = 0.0;
  for (std::int64_t a = 0; a < op.grid.active_count(); ++a) {
    if (!op.grid.is_interior(op.grid.active_cells[static_cast<std::size_t>(a)],
                             2)) {
      continue;
    }
    const double wv = op.w_diag[a * nb];
    for (int b = 0; b < nb; ++b) {
      const double d = lap[a * nb + b] - f[a * nb + b];
      num += wv * d * d;
      den += wv * f[a * nb + b] * f[a * nb + b];
    }
  }
  report.laplacian_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return {std::move(u), report};
}

double dirac_consistency_error(const DiscreteDirac& op, const CliffordField& u,
                               int width) {
  const Eigen::VectorXd uh = sample_field(op.grid, u);
  const Eigen::VectorXd duh = sample_dirac(op.grid, u);
  const Eigen::VectorXd au = op.a * uh;
  const int nb = op.blades;
  double err = 0.0;
  for (std::int64_t a = 0; a < op.grid.active_count(); ++a) {
    if (!op.grid.is_interior(op.grid.active_cells[static_cast<std::size_t>(a)],
                             width)) {
      continue;
    }
    for (int b = 0; b < nb; ++b) {
      err = std::max(err, std::abs(au[a * nb + b] - duh[a * nb + b]));
    }
  }
  return err;
}

double dirac_consistency_rms(const DiscreteDirac& op, const CliffordField& u,
                             int width) {
  const Eigen::VectorXd uh = sample_field(op.grid, u);
  const Eigen::VectorXd duh = sample_dirac(op.grid, u);
  const Eigen::VectorXd au = op.a * uh;
  const int nb = op.blades;
  double sum = 0.0;
  std::int64_t count = 0;
  for (std::int64_t a = 0; a < op.grid.active_count(); ++a) {
    if (!op.grid.is_interior(op.grid.active_cells[static_cast<std::size_t>(a)],
                             width)) {
      continue;
    }
    for (int b = 0; b < nb; ++b) {
      const double d = au[a * nb + b] - duh[a * nb + b];
      sum += d * d;
      ++count;
    }
  }
  return count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

SharpnessResult sharpness_sequence(int n, const std::vector<int>& m_values,
                                   int radial_nodes) {
  SharpnessResult out;
  out.m_values = m_values;
  const double sigma = sphere_area(n);
  const Rule1D gl = gauss_legendre(radial_nodes);
  const double log2 = std::log(2.0);

  auto integrate_radial = [&](double a, double b, auto&& f) {
    // geometric panels so that both the 1/m-scale ramp and the Gaussian bulk
    // are resolved
    std::vector<double> breaks{a};
    double r = a * 2.0;
    while (r < b * 0.999) {
      breaks.push_back(r);
      r *= 2.0;
    }
    breaks.push_back(b);
    PairwiseAccumulator acc;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double lo = breaks[p], hi = breaks[p + 1];
      for (int i = 0; i < gl.nodes.size(); ++i) {
        const double rr = 0.5 * (hi - lo) * (gl.nodes[i] + 1.0) + lo;
        acc.add(0.5 * (hi - lo) * gl.weights[i] * f(rr));
      }
    }
    return acc.total();
  };

  for (int m : m_values) {
    if (m < 2) throw std::invalid_argument("cutoff index m must be >= 2");
    const double r_in = 1.0 / m, r_ramp_in = 2.0 / m;
    const double r_ramp_out = static_cast<double>(m), r_out = 2.0 * m;
    auto chi = [&](double r) {
      if (r <= r_in || r >= r_out) return 0.0;
      if (r < r_ramp_in) return smoothstep5(std::log(m * r) / log2);
      if (r <= r_ramp_out) return 1.0;
      return smoothstep5(std::log(r_out / r) / log2);
    };
    auto r_chi_prime = [&](double r) {  // r * chi'(r) = d chi / d log r
      if (r <= r_in || r >= r_out) return 0.0;
      if (r < r_ramp_in) return smoothstep5_prime(std::log(m * r) / log2) / log2;
      if (r <= r_ramp_out) return 0.0;
      return -smoothstep5_prime(std::log(r_out / r) / log2) / log2;
    };
    const double cap = std::min(r_out, 30.0);  // e^{-r^2} underflows beyond
    const double wnorm = sigma * integrate_radial(r_in, cap, [&](double r) {
      const double c = chi(r);
      return c * c * r * r * std::pow(r, n - 1) * std::exp(-r * r);
    });
    const double dnorm = sigma * integrate_radial(r_in, cap, [&](double r) {
      // delta_phi(chi x) = chi (2 r^2 - n) - r chi'(r), purely radial scalar
      const double d = chi(r) * (2.0 * r * r - n) - r_chi_prime(r);
      return d * d * std::pow(r, n - 1) * std::exp(-r * r);
    });
    out.ratios.push_back(wnorm / dnorm);
  }

  // Closed-form cross-checks for the uncut extremals.
  out.norm_x_sq_closed =
      sigma * closed_form_radial(RadialShape::power_times_gaussian, n + 1, 0.0,
                                 std::numeric_limits<double>::infinity());
  out.norm_x_sq_quad = sigma * integrate_radial(1e-8, 30.0, [&](double r) {
    return r * r * std::pow(r, n - 1) * std::exp(-r * r);
  });
  out.norm_u0_sq_closed = 4.0 * out.norm_x_sq_closed;
  out.norm_u0_sq_quad = sigma * integrate_radial(1e-8, 30.0, [&](double r) {
    const double d = 2.0 * r * r - n;
    return d * d * std::pow(r, n - 1) * std::exp(-r * r);
  });
  return out;
}

}  // namespace diraclab
