#pragma once

namespace diraclab {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
/// a > 0, x >= 0. Series for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Lower incomplete gamma(a, x) = int_0^x t^{a-1} e^{-t} dt.
double lower_incomplete_gamma(double a, double x);

/// Upper incomplete Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
double upper_incomplete_gamma(double a, double x);

}  // namespace diraclab
