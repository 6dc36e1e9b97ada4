#include <unsupported/Eigen/FFT>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oflm/errors.hpp"
#include "oflm/isometry.hpp"
#include "oflm/kernels.hpp"

namespace oflm {

namespace {

constexpr double kPi = std::numbers::pi;

// Generalised binomial coefficient C(d, m).
double binom(double d, int m) {
    double r = 1.0;
    for (int j = 0; j < m; ++j) r *= (d - j) / (j + 1);
    return r;
}

// Leading Navot terms for a one-sided |u|^d singularity sampled on a grid that
// includes the singular node with value 0. psi_k holds psi^{(k)}(0); w_k holds
// zeta(-d-k) h^{d+k+1} / k!.
cplx navot_correction(const double* w, const cplx* psi_k, int terms) {
    cplx c = 0.0;
    for (int k = 0; k < terms; ++k) c -= w[k] * psi_k[k];
    return c;
}

struct SideSpectrum {
    std::vector<cplx> values;  // F(x_k) inside the band, zero elsewhere
};

// Transform of (t - s)_+^d - (-s)_+^d (plus) or (s - t)_+^d - s_+^d (minus).
SideSpectrum side_spectrum(double t, double d, Side side, const FourierPairGrid& g, double x_hi) {
    const long N = g.N;
    const double S = g.S;
    const double h = 2.0 * S / static_cast<double>(N);
    CVec lam(1);
    lam(0) = d;

    std::vector<cplx> samples(static_cast<std::size_t>(N));
    for (long j = 0; j < N; ++j) {
        const double s = -S + h * static_cast<double>(j);
        const ScalarKernelTerms k = time_kernel_terms(t, QPoint{s, 0.0}, lam);
        samples[static_cast<std::size_t>(j)] = side == Side::plus ? k.plus(0) : k.minus(0);
    }
    auto f_at = [&](double s) {
        const ScalarKernelTerms k = time_kernel_terms(t, QPoint{s, 0.0}, lam);
        return side == Side::plus ? k.plus(0) : k.minus(0);
    };
    auto fprime_at = [&](double s) -> cplx {
        // derivative of the one-sided pieces away from 0 and t
        double v = 0.0;
        if (side == Side::plus) {
            if (t - s > 0) v -= d * std::pow(t - s, d - 1.0);
            if (-s > 0) v += d * std::pow(-s, d - 1.0);
        } else {
            if (s - t > 0) v += d * std::pow(s - t, d - 1.0);
            if (s > 0) v -= d * std::pow(s, d - 1.0);
        }
        return v;
    };

    double w[4];
    double fact = 1.0;
    for (int k = 0; k < 4; ++k) {
        if (k > 0) fact *= k;
        w[k] = boost::math::zeta(-d - k) * std::pow(h, d + k + 1.0) / fact;
    }

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> out;
    fft.inv(out, samples);

    SideSpectrum res;
    res.values.resize(static_cast<std::size_t>(N));
    const double fm = f_at(-S).real(), fp = f_at(S).real();
    const cplx dm = fprime_at(-S), dp = fprime_at(S);
    for (long k = 0; k < N; ++k) {
        const long kk = k <= N / 2 ? k : k - N;
        const double x = kPi * static_cast<double>(kk) / S;
        if (std::abs(x) < g.band_lo || std::abs(x) > x_hi) continue;  // only the band is corrected
        cplx F = h * std::exp(cplx(0.0, -S * x)) * out[static_cast<std::size_t>(k)];
        // trapezoid end weights and first Euler-Maclaurin term
        const cplx em = std::exp(cplx(0.0, -S * x)), ep = std::exp(cplx(0.0, S * x));
        F += -0.5 * h * fm * em + 0.5 * h * fp * ep;
        const cplx gp_p = (dp + cplx(0.0, x) * fp) * ep;
        const cplx gp_m = (dm + cplx(0.0, x) * fm) * em;
        F -= h * h / 12.0 * (gp_p - gp_m);

        // singular nodes
        cplx psi1[4], psi2[4];
        const cplx ix = cplx(0.0, x);
        const cplx et = std::exp(cplx(0.0, t * x));
        cplx pw = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (side == Side::plus) {
                psi1[m] = pw * et;  // u = t - s, psi(u) = e^{i(t-u)x}
                psi2[m] = -pw;      // u = -s,   psi(u) = -e^{-iux}
                pw *= -ix;
            } else {
                psi1[m] = pw * et;  // u = s - t
                psi2[m] = -pw;      // u = s
                pw *= ix;
            }
        }
        F += navot_correction(w, psi1, 4) + navot_correction(w, psi2, 4);

        // analytic tail beyond the truncation point
        for (int m = 1; m <= 8; ++m) {
            const double c = binom(d, m) * std::pow(side == Side::plus ? t : -t, m);
            if (side == Side::plus) {
                F += c * oscillatory_power_tail(-x, m - d, S);  // s = -u
            } else {
                F += c * oscillatory_power_tail(x, m - d, S);
            }
        }
        res.values[static_cast<std::size_t>(k)] = F;
    }
    return res;
}

}  // namespace

namespace {
// +-|x|^{-D} Gamma(D+I) e^{-+ sign(x) i pi D / 2}
CMat closed_form_core(double x, const HurstSpec& hurst, Side side) {
    const Mat& D = hurst.D;
    const auto p = D.rows();
    const int sg = x > 0 ? 1 : -1;
    const CMat pw = matrix_power(Mat(-D), std::abs(x)).cast<cplx>();
    const CMat G = matrix_gamma((D + Mat::Identity(p, p)).cast<cplx>());
    const CMat ph = matrix_phase(D, side == Side::plus ? sg : -sg);
    // the minus side picks up (-ix)^{-1} = -(ix)^{-1}
    return side == Side::plus ? CMat(pw * G * ph) : CMat(-(pw * G * ph));
}
}  // namespace

CMat fourier_pair_closed_form(double t, double x, const HurstSpec& hurst, Side side) {
    return fourier_factor(t, x) * closed_form_core(x, hurst, side);
}

FourierPairReport verify_fourier_pair(double t, const HurstSpec& hurst, const FourierPairGrid& grid,
                                      double bound) {
    if (!hurst.time_kernel_general()) {
        throw ValidationError(std::string("Fourier pair check needs regime general, got ") +
                              to_string(hurst.report.regime));
    }
    if (grid.N < 16 || (grid.N & (grid.N - 1)) != 0) {
        throw std::invalid_argument("grid size must be a power of two");
    }
    const Spectral& S = hurst.spectral_D;
    if (!S.diagonalizable()) throw UnsupportedStructure("Fourier pair check needs diagonalizable D");
    for (Eigen::Index k = 0; k < S.eigenvalues().size(); ++k) {
        if (std::abs(S.eigenvalues()(k).imag()) > 1e-12) {
            throw UnsupportedStructure("Fourier pair check needs a real spectrum");
        }
    }
    const double h = 2.0 * grid.S / static_cast<double>(grid.N);
    const double nyquist = kPi / h;
    const double hi = std::min(grid.band_hi, nyquist / 10.0);
    const auto p = hurst.dim();

    FourierPairReport rep;
    for (Side side : {Side::plus, Side::minus}) {
        std::vector<SideSpectrum> spec;
        for (Eigen::Index k = 0; k < p; ++k) {
            spec.push_back(side_spectrum(t, S.eigenvalues()(k).real(), side, grid, hi));
        }
        for (long k = 0; k < grid.N; ++k) {
            const long kk = k <= grid.N / 2 ? k : k - grid.N;
            const double x = kPi * static_cast<double>(kk) / grid.S;
            if (std::abs(x) < grid.band_lo || std::abs(x) > hi) continue;
            CVec vals(p);
            for (Eigen::Index e = 0; e < p; ++e) vals(e) = spec[e].values[static_cast<std::size_t>(k)];
            const CMat num = S.apply_diagonal(vals);
            const CMat core = closed_form_core(x, hurst, side);
            const CMat ref = fourier_factor(t, x) * core;
            // relative to the envelope, since e_t(x) vanishes at multiples of 2 pi / t
            const double env =
                std::min(std::abs(t), 2.0 / std::abs(x)) * core.cwiseAbs().maxCoeff();
            const double rel = (num - ref).cwiseAbs().maxCoeff() / env;
            ++rep.frequencies_compared;
            if (rel > rep.residual) {
                rep.residual = rel;
                rep.worst_frequency = x;
            }
        }
    }
    if (rep.residual > bound) {
        throw GridTooCoarse("Fourier pair residual " + std::to_string(rep.residual) + " at x = " +
                            std::to_string(rep.worst_frequency) + " exceeds " + std::to_string(bound));
    }
    return rep;
}

Mat kernel_l2_gram(double t1, double t2, const FourierKernelParams& params, const QuadOptions& quad) {
    // the kernel is Hermitian in x, so the full-line gram is twice the half-line real part
    const auto p = params.dim();
    const Mat q = 0.25 * Mat::Identity(p, p);
    return fourier_isometry(t1, t2, params, q, q, quad);
}

Mat kernel_l2_gram(double t1, double t2, const TimeKernelParams& params, Domain domain,
                   const QuadOptions& quad) {
    if (domain == Domain::time) {
        return time_isometry(t1, t2, params, Mat::Identity(params.dim(), params.dim()), quad);
    }
    // Plancherel for F(f)(x) = int e^{isx} f(s) ds
    return kernel_l2_gram(t1, t2, fourier_from_time(params), quad) / (2.0 * kPi);
}

}  // namespace oflm
