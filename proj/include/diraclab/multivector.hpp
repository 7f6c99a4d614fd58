#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>

namespace diraclab {

/// Bitmask multi-index over the generators {1,...,n}: bit j-1 set <=> j in A.
/// The empty index (bits == 0) denotes the algebra unit.
using BladeIndex = std::uint32_t;

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 12;

/// Cardinality |A| of the multi-index.
int grade(BladeIndex bits) noexcept;

/// Signed product of two basis blades: e_A e_B = sign * e_{A xor B}.
/// sign = (-1)^{swaps} * (-1)^{|A & B|} where swaps counts pairs
/// (i in A, j in B) with i > j, and the second factor comes from e_j^2 = -1.
std::pair<double, BladeIndex> basis_product(BladeIndex a, BladeIndex b, int dim);

/// Row-major 2^dim x 2^dim table of blade-product signs, cached per dimension.
const std::int8_t* blade_sign_table(int dim);

/// Dense element of the real Clifford algebra R_n, coefficients indexed by
/// blade bitmask. Immutable value semantics; all free functions are pure.
class Multivector {
 public:
  explicit Multivector(int dim)
      : dim_(check_dim(dim)), coeffs_(Eigen::VectorXd::Zero(1 << dim)) {}

  Multivector(int dim, Eigen::VectorXd coeffs);

  static Multivector scalar(int dim, double value);
  static Multivector basis(int dim, BladeIndex bits);
  /// The vector x = sum_j x_j e_j.
  static Multivector vector(const Eigen::VectorXd& x);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return 1 << dim_; }

  double operator[](BladeIndex a) const { return coeffs_[static_cast<int>(a)]; }
  double& operator[](BladeIndex a) { return coeffs_[static_cast<int>(a)]; }

  const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXd& coeffs() noexcept { return coeffs_; }

  /// Scalar part Re(f) = f_{empty}.
  double re() const { return coeffs_[0]; }
  double squared_norm() const { return coeffs_.squaredNorm(); }
  double norm() const { return coeffs_.norm(); }

  /// Grade-1 coefficients as a vector in R^n.
  Eigen::VectorXd vector_part() const;

  /// True when all coefficients of grade > 1 vanish (within tol).
  bool is_paravector(double tol = 0.0) const;

  void set_zero() { coeffs_.setZero(); }

  Multivector& operator+=(const Multivector& rhs);
  Multivector& operator-=(const Multivector& rhs);
  Multivector& operator*=(double s);

  friend Multivector operator+(Multivector lhs, const Multivector& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend Multivector operator-(Multivector lhs, const Multivector& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend Multivector operator*(Multivector lhs, double s) {
    lhs *= s;
    return lhs;
  }
  friend Multivector operator*(double s, Multivector rhs) {
    rhs *= s;
    return rhs;
  }
  friend Multivector operator-(Multivector f) {
    f.coeffs_ = -f.coeffs_;
    return f;
  }

 private:
  static int check_dim(int dim);

  int dim_;
  Eigen::VectorXd coeffs_;
};

/// Geometric product fg.
Multivector gmul(const Multivector& f, const Multivector& g);
void gmul_into(const Multivector& f, const Multivector& g, Multivector& out);

/// e_j * g for a single generator (j is 1-based). O(2^n).
void gmul_basis_into(int j, const Multivector& g, Multivector& out);

/// (sum_j v_j e_j) * g for a coordinate vector v. O(n 2^n).
void gmul_vector_into(const Eigen::VectorXd& v, const Multivector& g,
                      Multivector& out);

/// Clifford conjugation, the unique algebra anti-automorphism with
/// conj(e_j) = -e_j; on blades conj(e_A) = (-1)^{l(l+1)/2} e_A, l = |A|.
Multivector conj(const Multivector& f);

/// <f,g> = Re(f conj(g)) = sum_A f_A g_A.
double inner(const Multivector& f, const Multivector& g);

/// |Re(ab) - Re(ba)|; zero up to rounding for all a, b.
double re_cyclic_residual(const Multivector& a, const Multivector& b);

inline Multivector operator*(const Multivector& f, const Multivector& g) {
  return gmul(f, g);
}

}  // namespace diraclab
