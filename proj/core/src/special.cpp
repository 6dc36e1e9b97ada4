#include "oflm/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace oflm {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Bernoulli numbers B_2, B_4, ..., B_16
constexpr std::array<double, 8> kBernoulli = {1.0 / 6,   -1.0 / 30,  1.0 / 42,    -1.0 / 30,
                                              5.0 / 66,  -691.0 / 2730, 7.0 / 6, -3617.0 / 510};

}  // namespace

cplx gamma(cplx z) {
    if (z.real() < 0.5) {
        return kPi / (std::sin(kPi * z) * gamma(1.0 - z));
    }
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    const cplx t = z + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

cplx digamma(cplx z) {
    if (z.real() < 0.5) {
        return digamma(1.0 - z) - kPi / std::tan(kPi * z);
    }
    cplx acc = 0.0;
    while (std::abs(z) < 12.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    const cplx z2 = 1.0 / (z * z);
    cplx zp = z2;
    cplx series = 0.0;
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        series += kBernoulli[k] / (2.0 * static_cast<double>(k + 1)) * zp;
        zp *= z2;
    }
    return acc + std::log(z) - 0.5 / z - series;
}

cplx trigamma(cplx z) {
    if (z.real() < 0.5) {
        const cplx s = std::sin(kPi * z);
        return kPi * kPi / (s * s) - trigamma(1.0 - z);
    }
    cplx acc = 0.0;
    while (std::abs(z) < 12.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    const cplx iz = 1.0 / z;
    const cplx z2 = iz * iz;
    cplx zp = z2 * iz;
    cplx series = 0.0;
    for (double b : kBernoulli) {
        series += b * zp;
        zp *= z2;
    }
    return acc + iz + 0.5 * z2 + series;
}

cplx gamma_derivative(cplx z, int k) {
    const cplx g = gamma(z);
    if (k == 0) return g;
    const cplx psi = digamma(z);
    if (k == 1) return g * psi;
    return g * (psi * psi + trigamma(z));
}

cplx expm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double sh = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

cplx pochhammer(cplx a, int k) {
    cplx r = 1.0;
    for (int j = 0; j < k; ++j) r *= a + static_cast<double>(j);
    return r;
}

cplx oscillatory_power_tail(double omega, cplx beta, double X) {
    if (omega == 0.0) {
        return std::pow(cplx(X), 1.0 - beta) / (beta - 1.0);
    }
    const cplx iwx = cplx(0.0, omega * X);
    const cplx lead = -std::exp(cplx(0.0, omega * X)) * std::pow(cplx(X), -beta) / cplx(0.0, omega);
    cplx sum = 0.0;
    cplx term = 1.0;
    double last = INFINITY;
    for (int k = 0; k < 40; ++k) {
        const double mag = std::abs(term);
        if (mag > last) break;  // asymptotic series: stop at the smallest term
        sum += term;
        last = mag;
        if (mag < 1e-18 * std::abs(sum)) break;
        term *= (beta + static_cast<double>(k)) / iwx;
    }
    return lead * sum;
}

}  // namespace oflm
