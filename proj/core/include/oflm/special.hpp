#pragma once

#include <complex>

namespace oflm {

using cplx = std::complex<double>;

// Gamma function on the complex plane (Lanczos, g = 7).
cplx gamma(cplx z);
cplx digamma(cplx z);
cplx trigamma(cplx z);

// k-th derivative of Gamma, k <= 2.
cplx gamma_derivative(cplx z, int k);

// exp(z) - 1 without cancellation for small |z|.
cplx expm1(cplx z);

// Rising factorial (a)_k.
cplx pochhammer(cplx a, int k);

// I(omega, beta, X) = int_X^inf e^{i omega x} x^{-beta} dx, X > 0.
// omega == 0 needs Re beta > 1; otherwise an asymptotic expansion in 1/(omega X)
// is used, so |omega| X should be at least ~30.
cplx oscillatory_power_tail(double omega, cplx beta, double X);

}  // namespace oflm
