#include "oflm/covariance.hpp"

#include <cmath>

#include "oflm/errors.hpp"

namespace oflm {

namespace {

Mat abs_power(const Mat& H, double x) {
    const double a = std::abs(x);
    if (a == 0.0) return Mat::Zero(H.rows(), H.cols());
    return matrix_power(H, a);
}

void require_identity(const Mat& M, const Mat& target, const char* what) {
    if ((M - target).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError(std::string(what) + " is not normalised");
    }
}

}  // namespace

Mat cov_maofLm(double s, double t, const TimeKernelParams& params, const LevyMeasure& mu,
               const QuadOptions& quad) {
    if (mu.dim() != params.dim()) throw ValidationError("Levy measure dimension must equal p");
    return time_isometry(s, t, params, second_moment(mu), quad);
}

Mat cov_rhofLm(double s, double t, const FourierKernelParams& params, const ComplexLevyView& mu,
               const QuadOptions& quad) {
    if (mu.p() != params.dim()) throw ValidationError("complex Levy measure must live on C^p");
    const ComplexMoments m = complex_moments(mu);
    return fourier_isometry(s, t, params, m.S11, m.S22, quad);
}

Mat cov_ofbm_reversible(double s, double t, const Mat& H, const Mat& Sigma) {
    auto term = [&](double x) {
        const Mat P = abs_power(H, x);
        return Mat(P * Sigma * P.transpose());
    };
    return 0.5 * (term(s) + term(t) - term(t - s));
}

OfbmMatch cov_matches_ofbm(const LevyMeasure& mu, const Mat& H) {
    const Mat M = second_moment(mu);
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw RankDeficientMoment("jump second moment is rank deficient");
    }
    OfbmMatch out;
    out.Q = psd_sqrt(M);
    out.H_prime = out.Q * H * psd_inv_sqrt(M);
    return out;
}

ParsevalReport parseval_residual(double s, double t, const TimeKernelParams& params,
                                 const LevyMeasure& mu_time, const ComplexLevyView& mu_fourier,
                                 const QuadOptions& quad) {
    const FourierKernelParams fp = fourier_from_time(params);
    const auto p = params.dim();
    require_identity(second_moment(mu_time), Mat::Identity(p, p), "time-domain measure");
    const ComplexMoments cm = complex_moments(mu_fourier);
    require_identity(4.0 * cm.S11, Mat::Identity(p, p), "real part of the Fourier-domain measure");
    require_identity(4.0 * cm.S22, Mat::Identity(p, p), "imaginary part of the Fourier-domain measure");
    ParsevalReport r;
    r.cov_time = cov_maofLm(s, t, params, mu_time, quad);
    r.cov_fourier = cov_rhofLm(s, t, fp, mu_fourier, quad) / kParsevalConstant;
    r.residual = (r.cov_time - r.cov_fourier).cwiseAbs().maxCoeff();
    return r;
}

ParsevalReport parseval_residual(double s, double t, const TimeKernelParams& params,
                                 const QuadOptions& quad) {
    const auto p = params.dim();
    std::vector<Atom> ta, fa;
    for (Eigen::Index k = 0; k < p; ++k) {
        ta.push_back({Vec::Unit(p, k), 1.0});
        Vec z = Vec::Zero(2 * p);
        z(k) = 0.5;
        z(p + k) = 0.5;
        fa.push_back({z, 1.0});
    }
    return parseval_residual(s, t, params, LevyMeasure::discrete(ta),
                             ComplexLevyView::make(LevyMeasure::discrete(fa)), quad);
}

double properness_beta(double delta) {
    if (!(delta > -1.0 && delta < 1.0)) throw ValidationError("delta must lie in (-1, 1)");
    // 4 int_0^inf (1 - cos y) y^{-2-delta} dy, split at X with an analytic tail
    const double X = 64.0 * std::numbers::pi;
    QuadOptions opt;
    opt.abs_tol = 1e-14;
    opt.global_tol = 1e-12;
    auto f = [&](QPoint q) {
        const double y = q.value();
        QVec v(1);
        const double s = std::sin(0.5 * y);
        v(0) = y > 0.0 ? 2.0 * s * s * std::pow(y, -2.0 - delta) : 0.0;
        return v;
    };
    std::vector<double> breaks;
    for (int k = 1; k < 64; ++k) breaks.push_back(k * std::numbers::pi);
    const double body = integrate_line(f, 1, 0.0, X, breaks, 1.0, opt).value(0).real();
    const double tail = std::pow(X, -1.0 - delta) / (1.0 + delta) -
                        oscillatory_power_tail(1.0, 2.0 + delta, X).real();
    return 4.0 * (body + tail);
}

double properness_det(double d1, double d2, double t) {
    for (double d : {d1, d2}) {
        if (!(d > -0.5 && d < 0.5)) throw ValidationError("d must lie in (-1/2, 1/2)");
    }
    if (t == 0.0) throw ValidationError("properness determinant needs t != 0");
    const double b12 = properness_beta(d1 + d2);
    return std::pow(std::abs(t), 2.0 + 2.0 * (d1 + d2)) *
           (properness_beta(2.0 * d1) * properness_beta(2.0 * d2) - b12 * b12);
}

}  // namespace oflm
