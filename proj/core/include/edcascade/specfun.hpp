#pragma once

// Scalar special functions: regularized incomplete gamma and its inverse,
// modified Bessel functions I and K of real order, and the generalized
// Marcum Q-function. Everything is pure and thread-safe.

#include <complex>

namespace edcascade::specfun {

/// Lower and upper regularized incomplete gamma computed together, so the
/// smaller of the two is never obtained by cancellation.
struct GammaPQ {
    double p;
    double q;
};

GammaPQ regularized_gamma_pq(double u, double x);

/// Q(u, x) = Gamma(u, x) / Gamma(u). Requires u > 0 and x >= 0.
double regularized_gamma_q(double u, double x);

/// P(u, x) = 1 - Q(u, x).
double regularized_gamma_p(double u, double x);

/// Solves Q(u, x) = p for x. Requires u > 0 and 0 < p <= 1; p = 1 gives 0.
double inverse_regularized_gamma_q(double u, double p);

/// x^a e^{-x} / Gamma(a + 1) for a >= 0, x >= 0, evaluated without the
/// cancellation of the naive log-domain formula when a is close to x.
double poisson_term(double a, double x);

/// Modified Bessel function of the first kind. Throws OverflowError when the
/// result is not representable (roughly x > 700).
double bessel_i(double nu, double x);

/// Modified Bessel function of the second kind; x > 0.
double bessel_k(double nu, double x);

/// Generalized Marcum Q-function Q_u(a, b) for real order u > 0.
double marcum_q(double u, double a, double b);

/// Clamps roundoff-scale excursions outside [0, 1]. Anything further than
/// 1e-9 outside is reported as a NumericalConsistencyError.
double clamp_probability(double p, const char* context);

/// Principal-ish log Gamma of a complex argument. Only exp() of the result is
/// meaningful; the imaginary part may differ from the principal branch by a
/// multiple of 2*pi.
std::complex<double> log_gamma(std::complex<double> z);

}  // namespace edcascade::specfun
