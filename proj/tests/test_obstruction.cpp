#include "diraclab/obstruction.hpp"

#include <doctest.h>

#include <cmath>

using namespace diraclab;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("closed-form norms and the divergent ratio") {
  // n = 3, m = 10: ||u||^2 = 5 sigma_2 = 20 pi, f-integral = pi/15, ratio 300
  const ObstructionResult r = counterexample_norms(3, 10);
  CHECK(r.norm_u_sq == doctest::Approx(20.0 * kPi).epsilon(1e-14));
  CHECK(r.weighted_f_integral == doctest::Approx(kPi / 15.0).epsilon(1e-14));
  CHECK(r.ratio == doctest::Approx(300.0).epsilon(1e-14));
  CHECK(r.norm_u_sq / r.weighted_f_integral ==
        doctest::Approx(r.ratio).epsilon(1e-12));

  // n = 4, m = 1 -> ratio 8
  CHECK(counterexample_norms(4, 1).ratio == doctest::Approx(8.0));

  // strictly increasing in m
  double prev = 0.0;
  for (int m = 1; m <= 12; ++m) {
    const double ratio = counterexample_norms(5, m).ratio;
    CHECK(ratio > prev);
    prev = ratio;
  }

  // the construction needs n >= 3
  CHECK_THROWS_AS(counterexample_norms(2, 1), std::invalid_argument);
}

TEST_CASE("quadrature cross-check against the closed forms") {
  for (int n : {3, 4, 5}) {
    for (int m : {1, 3, 10}) {
      const ObstructionResult r =
          counterexample_quadrature_crosscheck(n, m, 1e-9);
      CHECK(r.rel_err_u <= 1e-7);
      CHECK(r.rel_err_f <= 1e-7);
      CHECK(r.pointwise_dirac_residual <= 1e-8);
    }
  }
}

TEST_CASE("pointwise f_m value at x = (2,0,0) with m = 1") {
  const CliffordField f = obstruction_f(3, 1);
  Vec x = Vec::Zero(3);
  x[0] = 2.0;
  // f_1 = -(1) * 2^{-3} * x = -x/8
  Multivector expected = Multivector::vector(x);
  expected *= -1.0 / 8.0;
  CHECK((f(x) - expected).norm() <= 1e-15);
}

TEST_CASE("orthogonality of u_m to Kelvin-transformed monogenics") {
  // degree 0: Re(u_m conj(h)) vanishes pointwise for h = x/|x|^n
  {
    const OuterMonogenic h =
        make_outer_monogenic(gen_monogenic_poly(3, 0, 4));
    const double pairing = orthogonality_pairing(3, 1, h);
    CHECK(pairing <= 1e-10);
  }
  for (int n : {3, 4}) {
    for (int m : {1, 7}) {
      for (int degree : {0, 1}) {
        const OuterMonogenic h = make_outer_monogenic(
            gen_monogenic_poly(n, degree, 40 + static_cast<std::uint64_t>(degree)));
        CHECK(orthogonality_pairing(n, m, h) <= 1e-7);
      }
    }
  }
}

TEST_CASE("polynomial parts are rejected as non-integrable") {
  const MonogenicPolynomial p = gen_monogenic_poly(3, 1, 9);
  CHECK_THROWS_AS(require_weighted_integrable(p.as_field(), 3),
                  std::invalid_argument);
}

TEST_CASE("outer monogenics have zero spherical means") {
  // h = x/|x|^n: odd integrand, exactly zero under the symmetric rule
  {
    const CliffordField h =
        kelvin(constant_field(Multivector::scalar(3, 1.0)));
    CHECK(spherical_mean(h, 2.0) <= 1e-15);
  }
  // h = kelvin(x1 e2 + x2 e1): Re h = -2 x1 x2 / |x|^{n+2}
  {
    const int n = 3;
    std::vector<PolyMV::Term> terms;
    Eigen::VectorXi e1 = Eigen::VectorXi::Zero(n);
    Eigen::VectorXi e2 = Eigen::VectorXi::Zero(n);
    e1[0] = 1;
    e2[1] = 1;
    terms.push_back({e1, Multivector::basis(n, 0b010)});
    terms.push_back({e2, Multivector::basis(n, 0b001)});
    const CliffordField h = kelvin(PolyMV(n, terms).as_field());
    // check the scalar part formula at one point
    Vec x(3);
    x << 1.0, 2.0, -0.5;
    const double expected = -2.0 * x[0] * x[1] / std::pow(x.norm(), n + 2.0);
    CHECK(h(x).re() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(spherical_mean(h, 2.0) <= 1e-10);
  }
  // random generated outer monogenics
  for (int n : {3, 4}) {
    for (int degree : {0, 1, 2}) {
      const OuterMonogenic h = make_outer_monogenic(
          gen_monogenic_poly(n, degree, 7 + static_cast<std::uint64_t>(degree)));
      const SphereRule rule = sphere_rule(n, 12);
      double sup = 0.0;
      Vec x(n);
      for (int i = 0; i < rule.weights.size(); ++i) {
        x = 2.0 * rule.nodes.row(i);
        sup = std::max(sup, h.field(x).norm());
      }
      CHECK(spherical_mean(h.field, 2.0) <= 1e-8 * sup * sphere_area(n));
    }
  }
  // control: a constant field is NOT outer monogenic and has mean sigma
  {
    const CliffordField one = constant_field(Multivector::scalar(3, 1.0));
    CHECK(spherical_mean(one, 2.0) ==
          doctest::Approx(sphere_area(3)).epsilon(1e-12));
  }
}

TEST_CASE("the log weight is subharmonic on the exterior domain") {
  Rng rng(5);
  for (int n : {3, 4, 5}) {
    const Weight w = Weight::log_radial(n);
    for (int rep = 0; rep < 50; ++rep) {
      Vec dir(n);
      for (int j = 0; j < n; ++j) dir[j] = rng.normal();
      dir.normalize();
      const Vec x = rng.uniform(1.01, 8.0) * dir;
      CHECK(w.laplacian(x) > 0.0);
    }
  }
  // and degenerates at n = 2
  const Weight w2 = Weight::log_radial(2);
  Vec x(2);
  x << 1.7, -0.4;
  CHECK(std::abs(w2.laplacian(x)) <= 1e-16);
}
