#include "diraclab/fields.hpp"
#include "diraclab/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace diraclab;

namespace {

Vec random_point(int n, Rng& rng, double lo = 1.0, double hi = 2.5) {
  Vec dir(n);
  for (int j = 0; j < n; ++j) dir[j] = rng.normal();
  dir.normalize();
  return rng.uniform(lo, hi) * dir;
}

}  // namespace

TEST_CASE("dirac of the coordinate field is -n") {
  Rng rng(1);
  for (int n = 2; n <= 5; ++n) {
    const CliffordField u = coordinate_field(n);
    const Vec x = random_point(n, rng);
    const Multivector du = dirac(u, x);
    CHECK((du - Multivector::scalar(n, -n)).norm() <= 1e-12 * n);
  }
}

TEST_CASE("dirac of a constant field vanishes") {
  Rng rng(2);
  Multivector c(3);
  for (int a = 0; a < 8; ++a) c.coeffs()[a] = rng.normal();
  const CliffordField u = constant_field(c);
  CHECK(dirac(u, random_point(3, rng)).norm() == 0.0);
}

TEST_CASE("dirac of |x|^{-1/m} matches the closed form") {
  Rng rng(3);
  for (int m : {1, 4}) {
    for (int n : {3, 4}) {
      const CliffordField u(
          n, [n, m](const Vec& x) {
            Multivector out(n);
            out[0] = std::pow(x.norm(), -1.0 / m);
            return out;
          });
      const Vec x = random_point(n, rng);
      const double r = x.norm();
      Multivector expected = Multivector::vector(x);
      expected *= -std::pow(r, -1.0 / m - 2.0) / m;
      CHECK((dirac(u, x) - expected).norm() <= 1e-8);
    }
  }
}

TEST_CASE("formal adjoint examples") {
  Rng rng(4);
  const int n = 3;
  const Vec x = random_point(n, rng);

  // phi = |x|^2, u = x: delta u = 2|x|^2 - n
  const Weight gauss = Weight::radial_power(n, 2.0);
  const Multivector d1 = adjoint_formal(coordinate_field(n), gauss, x);
  CHECK((d1 - Multivector::scalar(n, 2.0 * x.squaredNorm() - n)).norm() <=
        1e-11);

  // phi = 0: delta_0 = D
  const Weight none = Weight::zero(n);
  const CliffordField u = random_bump_field(x, 0.5, 2, 99);
  const Vec y = x + Vec::Constant(n, 0.05);
  CHECK((adjoint_formal(u, none, y) - dirac(u, y)).norm() <= 1e-12);

  // phi = x_1^2, u = 1: delta u = -2 x_1 e_1
  const Weight quad = Weight::single_quadratic(n);
  const Multivector d3 =
      adjoint_formal(constant_field(Multivector::scalar(n, 1.0)), quad, x);
  Multivector expected(n);
  expected[1] = -2.0 * x[0];
  CHECK((d3 - expected).norm() <= 1e-13 * std::abs(x[0]) + 1e-14);
}

TEST_CASE("bump profile value and support") {
  const int n = 3;
  Vec c = Vec::Zero(n);
  c[0] = 1.5;
  Rng rng(5);
  const CliffordField u =
      bump_field(c, 0.5, PolyMV({n, {{Eigen::VectorXi::Zero(n),
                                      Multivector::scalar(n, 1.0)}}}));
  // b(0) = e^{-1}
  CHECK(u(c).re() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  // vanishes at and beyond the support sphere
  Vec edge = c;
  edge[1] += 0.5;
  CHECK(u(edge).norm() == 0.0);
  edge[1] += 0.3;
  CHECK(u(edge).norm() == 0.0);
  CHECK(u.support().has_value());
  CHECK(u.support()->radius == 0.5);
  CHECK_THROWS_AS(bump_field(c, -1.0, PolyMV({n, {}})), std::invalid_argument);
}

TEST_CASE("bump analytic partials match central differences") {
  Rng rng(6);
  for (int n : {2, 3}) {
    Vec c = Vec::Zero(n);
    c[0] = 1.4;
    const double rho = 0.45;
    const CliffordField u = random_bump_field(c, rho, 2, 1234);
    const double h = 1e-5;
    for (int rep = 0; rep < 20; ++rep) {
      Vec x = c;
      for (int j = 0; j < n; ++j) x[j] += rng.uniform(-0.6, 0.6) * rho;
      if ((x - c).norm() >= 0.95 * rho) continue;
      FieldFrame frame(n);
      u.eval_frame(x, frame);
      for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Multivector fd = (u(xp) - u(xm)) * (0.5 / h);
        const double scale = std::max(1.0, frame.du[j].norm());
        CHECK((frame.du[j] - fd).norm() <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("bump and first partials vanish at the support sphere") {
  const int n = 3;
  Vec c = Vec::Zero(n);
  c[0] = 1.5;
  const double rho = 0.4;
  const CliffordField u = random_bump_field(c, rho, 2, 77);
  Rng rng(8);
  FieldFrame frame(n);
  for (int rep = 0; rep < 10; ++rep) {
    Vec dir(n);
    for (int j = 0; j < n; ++j) dir[j] = rng.normal();
    dir.normalize();
    const Vec x = c + 0.999999 * rho * dir;
    u.eval_frame(x, frame);
    CHECK(frame.u.norm() <= 1e-12);
    for (int j = 0; j < n; ++j) CHECK(frame.du[j].norm() <= 1e-12);
  }
}

TEST_CASE("built-in weights match their closed forms") {
  Rng rng(9);
  // log_radial at |x| = 2, n = 3: lap = 3/4
  {
    const Weight w = Weight::log_radial(3);
    Vec x = Vec::Zero(3);
    x[0] = 2.0;
    CHECK(w.laplacian(x) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w.phi(x) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-15));
  }
  // radial_power m=2: Dphi = 2x, lap = 2n
  for (int n : {2, 3, 4}) {
    const Weight w = Weight::radial_power(n, 2.0);
    const Vec x = random_point(n, rng);
    CHECK((w.grad(x) - 2.0 * x).norm() <= 1e-14);
    CHECK(w.laplacian(x) == doctest::Approx(2.0 * n).epsilon(1e-15));
    // aniso with unit coefficients coincides
    const Weight wa = Weight::aniso_quadratic(Vec::Ones(n));
    CHECK(wa.phi(x) == doctest::Approx(w.phi(x)).epsilon(1e-14));
    CHECK((wa.grad(x) - w.grad(x)).norm() <= 1e-14 * x.norm());
    CHECK(wa.laplacian(x) == doctest::Approx(w.laplacian(x)).epsilon(1e-14));
  }
  // radial_power general m: lap = m(m+n-2) r^{m-2}
  for (double m : {-1.0, 1.5, 3.0}) {
    const int n = 3;
    const Weight w = Weight::radial_power(n, m);
    const Vec x = random_point(n, rng);
    const double r = x.norm();
    CHECK(w.laplacian(x) ==
          doctest::Approx(m * (m + n - 2) * std::pow(r, m - 2)).epsilon(1e-13));
    CHECK((w.grad(x) - m * std::pow(r, m - 2.0) * x).norm() <=
          1e-13 * w.grad(x).norm());
  }
  // |D phi| = |grad phi| as a multivector
  for (int n : {2, 3, 4}) {
    for (const Weight& w :
         {Weight::log_radial(n), Weight::radial_power(n, 2.0),
          Weight::single_quadratic(n)}) {
      const Vec x = random_point(n, rng);
      CHECK(w.dirac_phi(x).norm() ==
            doctest::Approx(w.grad(x).norm()).epsilon(1e-13));
    }
  }
  // m = 0 and nonpositive aniso coefficients are rejected
  CHECK_THROWS_AS(Weight::radial_power(3, 0.0), std::invalid_argument);
  Vec bad = Vec::Ones(3);
  bad[1] = -0.5;
  CHECK_THROWS_AS(Weight::aniso_quadratic(bad), std::invalid_argument);
}

TEST_CASE("monogenic generation produces exact null-space elements") {
  Rng rng(10);
  for (int n : {2, 3, 4}) {
    for (int degree : {0, 1, 2}) {
      const MonogenicPolynomial p = gen_monogenic_poly(n, degree, 42 + degree);
      const CliffordField field = p.as_field();
      for (int rep = 0; rep < 50; ++rep) {
        const Vec x = random_point(n, rng, 0.2, 2.0);
        CHECK(dirac(field, x).norm() <= 1e-10);
      }
    }
  }
  // x1 e2 + x2 e1 is in the degree-1 feasible set
  const int n = 3;
  std::vector<PolyMV::Term> terms;
  Eigen::VectorXi e1 = Eigen::VectorXi::Zero(n), e2 = Eigen::VectorXi::Zero(n);
  e1[0] = 1;
  e2[1] = 1;
  terms.push_back({e1, Multivector::basis(n, 0b010)});
  terms.push_back({e2, Multivector::basis(n, 0b001)});
  const PolyMV p(n, terms);
  Rng rng2(11);
  const Vec x = random_point(n, rng2);
  CHECK(dirac(p.as_field(), x).norm() <= 1e-13);
}

TEST_CASE("kelvin transform of constants and of the identity") {
  Rng rng(12);
  for (int n : {3, 4}) {
    // g = 1: K g = x/|x|^n, left monogenic away from 0
    const CliffordField k1 =
        kelvin(constant_field(Multivector::scalar(n, 1.0)));
    const Vec x = random_point(n, rng);
    const double r = x.norm();
    Multivector expected = Multivector::vector(x);
    expected *= std::pow(r, -n);
    CHECK((k1(x) - expected).norm() <= 1e-13 * expected.norm());
    CHECK(dirac(k1, x).norm() <= 1e-8);

    // g = y: K g = -|x|^{-n}, D(K g) = n x / |x|^{n+2}
    const CliffordField k2 = kelvin(coordinate_field(n));
    CHECK((k2(x) - Multivector::scalar(n, -std::pow(r, -n))).norm() <=
          1e-13 * std::pow(r, -n));
    Multivector dk_expected = Multivector::vector(x);
    dk_expected *= n * std::pow(r, -n - 2.0);
    CHECK((dirac(k2, x) - dk_expected).norm() <= 1e-10);
  }
  CHECK_THROWS_AS(kelvin(coordinate_field(3))(Vec::Zero(3)),
                  std::domain_error);
}

TEST_CASE("kelvin transform of homogeneous monogenics is x M / |x|^{n+2j}") {
  Rng rng(13);
  for (int n : {3, 4}) {
    for (int degree : {1, 2}) {
      const MonogenicPolynomial m = gen_monogenic_poly(n, degree, 5 + degree);
      const CliffordField km = kelvin(m.as_field());
      const CliffordField mf = m.as_field();
      for (int rep = 0; rep < 10; ++rep) {
        const Vec x = random_point(n, rng);
        const double r = x.norm();
        Multivector expected =
            gmul(Multivector::vector(x), mf(x));
        expected *= std::pow(r, -(n + 2.0 * degree));
        CHECK((km(x) - expected).norm() <=
              1e-11 * std::max(1.0, expected.norm()));
      }
    }
  }
}

TEST_CASE("kelvin satisfies the Dirac transformation identity") {
  // D[K g](x) = -(x/|x|^{n+2}) (Dg)(x/|x|^2) for polynomial g
  Rng rng(14);
  for (int n : {3, 4}) {
    Rng coeff_rng(21);
    const PolyMV poly = PolyMV::random(n, 2, coeff_rng);
    const CliffordField g = poly.as_field();
    const CliffordField kg = kelvin(g);
    for (int rep = 0; rep < 50; ++rep) {
      const Vec x = random_point(n, rng, 1.0, 3.0);
      const double r = x.norm();
      const Vec y = x / (r * r);
      Multivector rhs = gmul(Multivector::vector(x), dirac(g, y));
      rhs *= -std::pow(r, -(n + 2.0));
      const Multivector lhs = dirac(kg, x);
      CHECK((lhs - rhs).norm() <= 1e-6 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST_CASE("finite-difference partials agree with analytic ones") {
  const int n = 3;
  Rng rng(15);
  Vec c = Vec::Zero(n);
  c[0] = 1.5;
  const CliffordField analytic = random_bump_field(c, 0.5, 2, 31);
  // strip the analytic partials
  const CliffordField fd(n, [analytic](const Vec& x) { return analytic(x); });
  for (int rep = 0; rep < 10; ++rep) {
    Vec x = c;
    for (int j = 0; j < n; ++j) x[j] += rng.uniform(-0.3, 0.3);
    FieldFrame fa(n), fb(n);
    analytic.eval_frame(x, fa);
    fd.eval_frame(x, fb);
    for (int j = 0; j < n; ++j) {
      CHECK((fa.du[j] - fb.du[j]).norm() <=
            1e-8 * std::max(1.0, fa.du[j].norm()));
    }
  }
}
