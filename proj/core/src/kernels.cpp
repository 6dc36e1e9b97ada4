#include "oflm/kernels.hpp"

#include <cmath>

#include "oflm/errors.hpp"

namespace oflm {

namespace {

// x^lam - y^lam for x = y + t, both positive.
double power_difference(double x, double y, double t, double lam) {
    if (std::abs(t) < 0.5 * y) return std::pow(y, lam) * std::expm1(lam * std::log1p(t / y));
    return std::pow(x, lam) - std::pow(y, lam);
}

cplx power_difference(double x, double y, double t, cplx lam) {
    if (std::abs(t) < 0.5 * y) {
        return std::pow(y, lam) * expm1(lam * std::log1p(t / y));
    }
    return std::pow(x, lam) - std::pow(y, lam);
}

cplx pow_pos(double x, cplx lam) { return x > 0.0 ? std::exp(lam * std::log(x)) : cplx(0.0); }

Mat real_part_checked(const CMat& m) { return m.real(); }

}  // namespace

TimeKernelParams TimeKernelParams::general(HurstSpec h, Mat Mp, Mat Mm) {
    if (!h.time_kernel_general()) {
        throw ValidationError(std::string("general time kernel needs regime general, got ") +
                              to_string(h.report.regime));
    }
    const auto p = h.dim();
    if (Mp.rows() != p || Mp.cols() != p || Mm.rows() != p || Mm.cols() != p) {
        throw std::invalid_argument("M_plus/M_minus must be p x p");
    }
    TimeKernelParams k;
    k.variant = Variant::general;
    k.M_plus = std::move(Mp);
    k.M_minus = std::move(Mm);
    k.hurst = std::move(h);
    return k;
}

TimeKernelParams TimeKernelParams::half(HurstSpec h, Mat M, Mat N) {
    if (h.report.regime != Regime::half_identity) {
        throw ValidationError("half time kernel needs H = I/2");
    }
    const auto p = h.dim();
    if (M.rows() != p || M.cols() != p || N.rows() != p || N.cols() != p) {
        throw std::invalid_argument("M/N must be p x p");
    }
    TimeKernelParams k;
    k.variant = Variant::half;
    k.M = std::move(M);
    k.N = std::move(N);
    k.hurst = std::move(h);
    return k;
}

FourierKernelParams FourierKernelParams::make(HurstSpec h, CMat A) {
    if (A.rows() != h.dim() || A.cols() != h.dim()) throw std::invalid_argument("A must be p x p");
    return FourierKernelParams{std::move(A), std::move(h)};
}

void time_kernel_terms(double t, QPoint s, const CVec& lambda, CVec& plus, CVec& minus) {
    const Eigen::Index p = lambda.size();
    const double a = (t - s.anchor) - s.offset;  // t - s
    const double b = -s.anchor - s.offset;       // -s
    for (Eigen::Index k = 0; k < p; ++k) {
        const cplx lam = lambda(k);
        if (lam.imag() == 0.0) {
            const double l = lam.real();
            if (a > 0.0 && b > 0.0) {
                plus(k) = power_difference(a, b, t, l);
                minus(k) = 0.0;
            } else if (a < 0.0 && b < 0.0) {
                plus(k) = 0.0;
                minus(k) = power_difference(-a, -b, -t, l);
            } else {
                plus(k) = (a > 0.0 ? std::pow(a, l) : 0.0) - (b > 0.0 ? std::pow(b, l) : 0.0);
                minus(k) = (a < 0.0 ? std::pow(-a, l) : 0.0) - (b < 0.0 ? std::pow(-b, l) : 0.0);
            }
            continue;
        }
        if (a > 0.0 && b > 0.0) {
            plus(k) = power_difference(a, b, t, lam);
        } else {
            plus(k) = pow_pos(a, lam) - pow_pos(b, lam);
        }
        if (a < 0.0 && b < 0.0) {
            minus(k) = power_difference(-a, -b, -t, lam);
        } else {
            minus(k) = pow_pos(-a, lam) - pow_pos(-b, lam);
        }
    }
}

ScalarKernelTerms time_kernel_terms(double t, QPoint s, const CVec& lambda) {
    ScalarKernelTerms out{CVec(lambda.size()), CVec(lambda.size())};
    time_kernel_terms(t, s, lambda, out.plus, out.minus);
    return out;
}

cplx fourier_factor(double t, double x) {
    const double y = 0.5 * t * x;
    const double sinc = std::abs(y) < 1e-8 ? 1.0 - y * y / 6.0 : std::sin(y) / y;
    return t * sinc * std::exp(cplx(0.0, y));
}

Mat time_kernel(double t, double s, const TimeKernelParams& params) {
    return time_kernel(t, QPoint{s, 0.0}, params);
}

Mat time_kernel(double t, QPoint s, const TimeKernelParams& params) {
    const auto p = params.dim();
    const double a = (t - s.anchor) - s.offset;
    const double b = -s.anchor - s.offset;
    if (params.variant == TimeKernelParams::Variant::half) {
        if (a == 0.0 || b == 0.0) return Mat::Zero(p, p);
        const double sg = (a > 0 ? 1.0 : -1.0) - (b > 0 ? 1.0 : -1.0);
        const double r = t / b;  // a/b = 1 + t/b
        const double lg = std::abs(r) < 0.5 ? std::log1p(r) : std::log(std::abs(a) / std::abs(b));
        return sg * params.M + lg * params.N;
    }
    const Spectral& S = params.hurst.spectral_D;
    if (S.diagonalizable()) {
        const ScalarKernelTerms terms = time_kernel_terms(t, s, S.eigenvalues());
        const CMat plus = S.apply_diagonal(terms.plus);
        const CMat minus = S.apply_diagonal(terms.minus);
        return real_part_checked(plus * params.M_plus.cast<cplx>() +
                                 minus * params.M_minus.cast<cplx>());
    }
    // Jordan path: derivatives in lambda of x^lambda are (log x)^k x^lambda.
    auto side_fn = [&](double x, double y) {
        return S.apply([&](cplx lam, int k) {
            cplx v = 0.0;
            if (x > 0.0) v += std::pow(std::log(x), k) * std::exp(lam * std::log(x));
            if (y > 0.0) v -= std::pow(std::log(y), k) * std::exp(lam * std::log(y));
            return v;
        });
    };
    const CMat plus = side_fn(a, b);
    const CMat minus = side_fn(-a, -b);
    return real_part_checked(plus * params.M_plus.cast<cplx>() + minus * params.M_minus.cast<cplx>());
}

CMat fourier_kernel(double t, double x, const FourierKernelParams& params) {
    const auto p = params.dim();
    if (x == 0.0 || t == 0.0) return CMat::Zero(p, p);
    const double ax = std::abs(x);
    const double lx = std::log(ax);
    const Spectral& S = params.hurst.spectral_D;
    Mat xpow;
    if (S.diagonalizable()) {
        CVec v(S.eigenvalues().size());
        for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = std::exp(-S.eigenvalues()(k) * lx);
        xpow = S.apply_diagonal(v).real();
    } else {
        xpow = S.apply([&](cplx lam, int k) { return std::pow(-lx, k) * std::exp(-lam * lx); }).real();
    }
    const cplx e = fourier_factor(t, x);
    if (x > 0.0) return e * (xpow.cast<cplx>() * params.A);
    return e * (xpow.cast<cplx>() * params.A.conjugate());
}

double kernel_scaling_residual(double c, double t, const std::vector<double>& sample_points,
                               const TimeKernelParams& params) {
    if (params.variant != TimeKernelParams::Variant::general) {
        throw ValidationError("kernel scaling residual needs the general variant");
    }
    const Mat cD = matrix_power(params.hurst.D, c);
    double worst = 0.0;
    for (double s : sample_points) {
        const Mat lhs = time_kernel(c * t, c * s, params);
        const Mat rhs = cD * time_kernel(t, s, params);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

FourierKernelParams fourier_from_time(const TimeKernelParams& params) {
    if (params.variant != TimeKernelParams::Variant::general ||
        params.M_minus.cwiseAbs().maxCoeff() != 0.0) {
        throw UnlinkedParams("conversion to the Fourier parametrisation needs M_minus = 0");
    }
    const Mat& D = params.hurst.D;
    const auto p = D.rows();
    const CMat G = params.hurst.jordan
                       ? params.hurst.spectral_D.shifted(1.0).apply(
                             [](cplx lam, int k) { return gamma_derivative(lam, k); })
                       : matrix_gamma((D + Mat::Identity(p, p)).cast<cplx>());
    const CMat A = G * matrix_phase(D, 1) * params.M_plus.cast<cplx>();
    return FourierKernelParams{A, params.hurst};
}

}  // namespace oflm
