#include "diraclab/multivector.hpp"

#include <bit>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace diraclab {

namespace {

// Pairs (i in A, j in B) with i > j: shifting A down k places and intersecting
// with B counts the pairs at distance k.
int swap_count(BladeIndex a, BladeIndex b) noexcept {
  int s = 0;
  a >>= 1;
  while (a != 0) {
    s += std::popcount(a & b);
    a >>= 1;
  }
  return s;
}

double blade_sign(BladeIndex a, BladeIndex b) noexcept {
  const int par = swap_count(a, b) + std::popcount(a & b);
  return (par & 1) ? -1.0 : 1.0;
}

// Sign tables are cached for dimensions where the 4^n footprint stays small.
constexpr int kMaxCachedDim = 10;

}  // namespace

int grade(BladeIndex bits) noexcept { return std::popcount(bits); }

int Multivector::check_dim(int dim) {
  if (dim < kMinDim || dim > kMaxDim) {
    throw std::invalid_argument("Multivector dimension must be in [2, 12]");
  }
  return dim;
}

Multivector::Multivector(int dim, Eigen::VectorXd coeffs)
    : dim_(check_dim(dim)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != (1 << dim_)) {
    throw std::invalid_argument("coefficient array must have length 2^dim");
  }
}

Multivector Multivector::scalar(int dim, double value) {
  Multivector f(dim);
  f.coeffs_[0] = value;
  return f;
}

Multivector Multivector::basis(int dim, BladeIndex bits) {
  Multivector f(dim);
  if (bits >= static_cast<BladeIndex>(1u << dim)) {
    throw std::invalid_argument("blade index out of range for dimension");
  }
  f.coeffs_[static_cast<int>(bits)] = 1.0;
  return f;
}

Multivector Multivector::vector(const Eigen::VectorXd& x) {
  Multivector f(static_cast<int>(x.size()));
  for (int j = 0; j < x.size(); ++j) {
    f.coeffs_[1 << j] = x[j];
  }
  return f;
}

Eigen::VectorXd Multivector::vector_part() const {
  Eigen::VectorXd x(dim_);
  for (int j = 0; j < dim_; ++j) {
    x[j] = coeffs_[1 << j];
  }
  return x;
}

bool Multivector::is_paravector(double tol) const {
  for (int a = 0; a < size(); ++a) {
    if (grade(static_cast<BladeIndex>(a)) > 1 &&
        std::abs(coeffs_[a]) > tol) {
      return false;
    }
  }
  return true;
}

Multivector& Multivector::operator+=(const Multivector& rhs) {
  if (dim_ != rhs.dim_) throw std::invalid_argument("dimension mismatch");
  coeffs_ += rhs.coeffs_;
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& rhs) {
  if (dim_ != rhs.dim_) throw std::invalid_argument("dimension mismatch");
  coeffs_ -= rhs.coeffs_;
  return *this;
}

Multivector& Multivector::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

std::pair<double, BladeIndex> basis_product(BladeIndex a, BladeIndex b,
                                            int dim) {
  if (dim < kMinDim || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in [2, 12]");
  }
  const BladeIndex top = static_cast<BladeIndex>(1u << dim);
  if (a >= top || b >= top) {
    throw std::invalid_argument("blade index out of range for dimension");
  }
  return {blade_sign(a, b), a ^ b};
}

const std::int8_t* blade_sign_table(int dim) {
  static std::vector<std::int8_t> tables[kMaxCachedDim + 1];
  static std::once_flag built[kMaxCachedDim + 1];
  if (dim < kMinDim || dim > kMaxCachedDim) return nullptr;
  std::call_once(built[dim], [dim] {
    const int nb = 1 << dim;
    auto& t = tables[dim];
    t.resize(static_cast<std::size_t>(nb) * nb);
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) {
        t[static_cast<std::size_t>(a) * nb + b] = static_cast<std::int8_t>(
            blade_sign(static_cast<BladeIndex>(a), static_cast<BladeIndex>(b)));
      }
    }
  });
  return tables[dim].data();
}

void gmul_into(const Multivector& f, const Multivector& g, Multivector& out) {
  if (f.dim() != g.dim() || f.dim() != out.dim()) {
    throw std::invalid_argument("dimension mismatch in geometric product");
  }
  const int nb = f.size();
  out.set_zero();
  const double* fa = f.coeffs().data();
  const double* gb = g.coeffs().data();
  double* oc = out.coeffs().data();
  if (const std::int8_t* table = blade_sign_table(f.dim())) {
    for (int a = 0; a < nb; ++a) {
      const double t = fa[a];
      if (t == 0.0) continue;
      const std::int8_t* row = table + static_cast<std::size_t>(a) * nb;
      for (int b = 0; b < nb; ++b) {
        oc[a ^ b] += row[b] * t * gb[b];
      }
    }
  } else {
    for (int a = 0; a < nb; ++a) {
      const double t = fa[a];
      if (t == 0.0) continue;
      for (int b = 0; b < nb; ++b) {
        oc[a ^ b] += blade_sign(static_cast<BladeIndex>(a),
                                static_cast<BladeIndex>(b)) *
                     t * gb[b];
      }
    }
  }
}

Multivector gmul(const Multivector& f, const Multivector& g) {
  Multivector out(f.dim());
  gmul_into(f, g, out);
  return out;
}

void gmul_basis_into(int j, const Multivector& g, Multivector& out) {
  if (j < 1 || j > g.dim()) throw std::invalid_argument("generator index");
  const int nb = g.size();
  const BladeIndex ej = static_cast<BladeIndex>(1u << (j - 1));
  const double* gb = g.coeffs().data();
  double* oc = out.coeffs().data();
  for (int b = 0; b < nb; ++b) {
    oc[ej ^ static_cast<BladeIndex>(b)] =
        blade_sign(ej, static_cast<BladeIndex>(b)) * gb[b];
  }
}

void gmul_vector_into(const Eigen::VectorXd& v, const Multivector& g,
                      Multivector& out) {
  if (v.size() != g.dim() || out.dim() != g.dim()) {
    throw std::invalid_argument("dimension mismatch in vector product");
  }
  const int nb = g.size();
  const double* gb = g.coeffs().data();
  double* oc = out.coeffs().data();
  out.set_zero();
  for (int j = 0; j < g.dim(); ++j) {
    const double vj = v[j];
    if (vj == 0.0) continue;
    const BladeIndex ej = static_cast<BladeIndex>(1u << j);
    for (int b = 0; b < nb; ++b) {
      oc[ej ^ static_cast<BladeIndex>(b)] +=
          vj * blade_sign(ej, static_cast<BladeIndex>(b)) * gb[b];
    }
  }
}

Multivector conj(const Multivector& f) {
  Multivector out(f.dim());
  for (int a = 0; a < f.size(); ++a) {
    const int l = grade(static_cast<BladeIndex>(a));
    const double s = ((l * (l + 1) / 2) & 1) ? -1.0 : 1.0;
    out.coeffs()[a] = s * f.coeffs()[a];
  }
  return out;
}

double inner(const Multivector& f, const Multivector& g) {
  if (f.dim() != g.dim()) {
    throw std::invalid_argument("dimension mismatch in inner product");
  }
  return f.coeffs().dot(g.coeffs());
}

double re_cyclic_residual(const Multivector& a, const Multivector& b) {
  // Only the scalar coefficient of the products is needed.
  const int nb = a.size();
  double re_ab = 0.0, re_ba = 0.0;
  for (int c = 0; c < nb; ++c) {
    const double s = blade_sign(static_cast<BladeIndex>(c),
                                static_cast<BladeIndex>(c));
    re_ab += s * a.coeffs()[c] * b.coeffs()[c];
    re_ba += s * b.coeffs()[c] * a.coeffs()[c];
  }
  return std::abs(re_ab - re_ba);
}

}  // namespace diraclab
