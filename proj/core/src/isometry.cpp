#include "oflm/isometry.hpp"

#include <algorithm>
#include <cmath>

#include "oflm/errors.hpp"

namespace oflm {

namespace {

const Spectral& require_diagonal(const HurstSpec& h) {
    if (!h.spectral_D.diagonalizable()) {
        throw UnsupportedStructure("quadrature paths need a diagonalizable Hurst matrix");
    }
    return h.spectral_D;
}

double line_scale(double s, double t) { return std::max({1.0, std::abs(s), std::abs(t)}); }

struct HalfTerms {
    double c1, c2;
};

HalfTerms half_terms(double t, QPoint u) {
    const double a = (t - u.anchor) - u.offset;
    const double b = -u.anchor - u.offset;
    if (a == 0.0 || b == 0.0) return {0.0, 0.0};
    const double sg = (a > 0 ? 1.0 : -1.0) - (b > 0 ? 1.0 : -1.0);
    const double r = t / b;
    const double lg = std::abs(r) < 0.5 ? std::log1p(r) : std::log(std::abs(a) / std::abs(b));
    return {sg, lg};
}

}  // namespace

Mat time_isometry(double s, double t, const TimeKernelParams& params, const Mat& Sigma,
                  const QuadOptions& quad, double lo, double hi) {
    const auto p = params.dim();
    if (s == 0.0 || t == 0.0) return Mat::Zero(p, p);
    const std::vector<double> breaks{0.0, s, t};
    const double scale = line_scale(s, t);

    if (params.variant == TimeKernelParams::Variant::half) {
        auto f = [&](QPoint u) -> QVec {
            const HalfTerms a = half_terms(s, u), b = half_terms(t, u);
            QVec v(4);
            v << a.c1 * b.c1, a.c1 * b.c2, a.c2 * b.c1, a.c2 * b.c2;
            return v;
        };
        const QVec I = integrate_line(f, 4, lo, hi, breaks, scale, quad).value;
        const Mat* X[2] = {&params.M, &params.N};
        Mat out = Mat::Zero(p, p);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out += I(2 * i + j).real() * (*X[i]) * Sigma * X[j]->transpose();
        return out;
    }

    const Spectral& S = require_diagonal(params.hurst);
    const CVec& lam = S.eigenvalues();
    const CMat L[2] = {S.Pinv() * params.M_plus.cast<cplx>(), S.Pinv() * params.M_minus.cast<cplx>()};
    const CMat Sc = Sigma.cast<cplx>();
    struct Group {
        int a, b;
        CMat W;
    };
    std::vector<Group> groups;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            CMat W = L[a] * Sc * L[b].adjoint();
            if (W.cwiseAbs().maxCoeff() > 0.0) groups.push_back({a, b, std::move(W)});
        }
    if (groups.empty()) return Mat::Zero(p, p);
    const Eigen::Index pp = p * p;
    const Eigen::Index dim = static_cast<Eigen::Index>(groups.size()) * pp;

    auto f = [&](QPoint u) -> QVec {
        const ScalarKernelTerms ts = time_kernel_terms(s, u, lam);
        const ScalarKernelTerms tt = time_kernel_terms(t, u, lam);
        const CVec* A[2] = {&ts.plus, &ts.minus};
        const CVec* B[2] = {&tt.plus, &tt.minus};
        QVec v(dim);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const CVec& x = *A[groups[g].a];
            const CVec& y = *B[groups[g].b];
            for (Eigen::Index k = 0; k < p; ++k)
                for (Eigen::Index l = 0; l < p; ++l)
                    v(static_cast<Eigen::Index>(g) * pp + k * p + l) = x(k) * std::conj(y(l));
        }
        return v;
    };
    const QVec I = integrate_line(f, dim, lo, hi, breaks, scale, quad).value;
    CMat inner = CMat::Zero(p, p);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (Eigen::Index k = 0; k < p; ++k)
            for (Eigen::Index l = 0; l < p; ++l)
                inner(k, l) += I(static_cast<Eigen::Index>(g) * pp + k * p + l) * groups[g].W(k, l);
    return (S.P() * inner * S.P().adjoint()).real();
}

namespace {

struct FreqTerm {
    double omega;
    double coef;
};

}  // namespace

Mat fourier_isometry(double s, double t, const FourierKernelParams& params, const Mat& S11,
                     const Mat& S22, const QuadOptions& quad, double x_lo) {
    const auto p = params.dim();
    if (s == 0.0 || t == 0.0) return Mat::Zero(p, p);
    if (x_lo < 0.0) throw std::invalid_argument("x_lo must be non-negative");
    const Spectral& S = require_diagonal(params.hurst);
    const CVec& lam = S.eigenvalues();
    const CMat L = S.Pinv() * params.A;
    const Mat Ssum = S11 + S22, Sdiff = S11 - S22;
    const CMat WJ = L * Ssum.cast<cplx>() * L.adjoint();
    const CMat WK = L * Sdiff.cast<cplx>() * L.transpose();
    const bool useK = Sdiff.cwiseAbs().maxCoeff() > 0.0;
    const Eigen::Index pp = p * p;
    const Eigen::Index dim = useK ? 2 * pp : pp;

    auto f = [&](double x) -> QVec {
        QVec v(dim);
        if (x <= 0.0) return QVec::Zero(dim);
        const double lx = std::log(x);
        CVec xl(p);
        for (Eigen::Index k = 0; k < p; ++k) xl(k) = std::exp(-lam(k) * lx);
        const cplx es = fourier_factor(s, x), et = fourier_factor(t, x);
        const cplx ej = es * std::conj(et), ek = es * et;
        for (Eigen::Index k = 0; k < p; ++k)
            for (Eigen::Index l = 0; l < p; ++l) {
                v(k * p + l) = ej * xl(k) * std::conj(xl(l));
                if (useK) v(pp + k * p + l) = ek * xl(k) * xl(l);
            }
        return v;
    };
    auto fq = [&](QPoint u) -> QVec { return f(u.value()); };

    const std::vector<FreqTerm> fj{{s - t, 1.0}, {s, -1.0}, {-t, -1.0}, {0.0, 1.0}};
    const std::vector<FreqTerm> fk{{s + t, -1.0}, {s, 1.0}, {t, 1.0}, {0.0, -1.0}};
    double wmax = std::max({std::abs(s), std::abs(t), std::abs(s - t)});
    if (useK) wmax = std::max(wmax, std::abs(s + t));
    double wmin = wmax;
    auto scan = [&](const std::vector<FreqTerm>& terms) {
        for (const auto& ft : terms)
            if (std::abs(ft.omega) > 0.0) wmin = std::min(wmin, std::abs(ft.omega));
    };
    scan(fj);
    if (useK) scan(fk);

    const double h = 1.0 / wmax;
    QVec I = QVec::Zero(dim);
    double err = 0.0;
    double start = x_lo;
    if (x_lo < h) {
        const QuadResult r = integrate_line(fq, dim, x_lo, h, {}, h, quad);
        I += r.value;
        err += r.error;
        start = h;
    }
    const double span = std::max(40.0 / wmin, 40.0 * h);
    const long n = static_cast<long>(std::ceil(span / h));
    const double X = start + static_cast<double>(n) * h;
    const QuadResult r = integrate_panels(f, dim, start, X, n, quad);
    I += r.value;
    err += r.error;

    for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index l = 0; l < p; ++l) {
            const cplx bj = 2.0 + lam(k) + std::conj(lam(l));
            for (const auto& ft : fj) I(k * p + l) += ft.coef * oscillatory_power_tail(ft.omega, bj, X);
            if (useK) {
                const cplx bk = 2.0 + lam(k) + lam(l);
                for (const auto& ft : fk)
                    I(pp + k * p + l) += ft.coef * oscillatory_power_tail(ft.omega, bk, X);
            }
        }
    if (err > quad.global_tol * std::max(1.0, I.cwiseAbs().maxCoeff())) {
        throw QuadratureNotConverged("Fourier isometry error budget exceeded");
    }

    CMat J(p, p), K(p, p);
    for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index l = 0; l < p; ++l) {
            J(k, l) = I(k * p + l) * WJ(k, l);
            K(k, l) = useK ? I(pp + k * p + l) * WK(k, l) : cplx(0.0);
        }
    CMat out = S.P() * J * S.P().adjoint();
    if (useK) out += S.P() * K * S.P().transpose();
    return 4.0 * out.real();
}

Mat time_isometry_grid(const std::vector<double>& grid, const TimeKernelParams& params,
                       const Mat& Sigma, const QuadOptions& quad, double lo, double hi) {
    const auto p = params.dim();
    const auto n = static_cast<Eigen::Index>(grid.size());
    Mat G = Mat::Zero(p * n, p * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const Mat b = time_isometry(grid[i], grid[j], params, Sigma, quad, lo, hi);
            G.block(i * p, j * p, p, p) = b;
            G.block(j * p, i * p, p, p) = b.transpose();
        }
    return G;
}

Mat fourier_isometry_grid(const std::vector<double>& grid, const FourierKernelParams& params,
                          const Mat& S11, const Mat& S22, const QuadOptions& quad, double x_lo) {
    const auto p = params.dim();
    const auto n = static_cast<Eigen::Index>(grid.size());
    Mat G = Mat::Zero(p * n, p * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const Mat b = fourier_isometry(grid[i], grid[j], params, S11, S22, quad, x_lo);
            G.block(i * p, j * p, p, p) = b;
            G.block(j * p, i * p, p, p) = b.transpose();
        }
    return G;
}

Mat time_kernel_integral(double t, const TimeKernelParams& params, double lo, double hi,
                         const QuadOptions& quad) {
    const auto p = params.dim();
    if (t == 0.0 || !(lo < hi)) return Mat::Zero(p, p);
    const std::vector<double> breaks{0.0, t};
    const double scale = line_scale(t, 0.0);
    if (params.variant == TimeKernelParams::Variant::half) {
        auto f = [&](QPoint u) -> QVec {
            const HalfTerms h = half_terms(t, u);
            QVec v(2);
            v << h.c1, h.c2;
            return v;
        };
        const QVec I = integrate_line(f, 2, lo, hi, breaks, scale, quad).value;
        return I(0).real() * params.M + I(1).real() * params.N;
    }
    const Spectral& S = require_diagonal(params.hurst);
    const CVec& lam = S.eigenvalues();
    auto f = [&](QPoint u) -> QVec {
        const ScalarKernelTerms k = time_kernel_terms(t, u, lam);
        QVec v(2 * p);
        v << k.plus, k.minus;
        return v;
    };
    const QVec I = integrate_line(f, 2 * p, lo, hi, breaks, scale, quad).value;
    const CMat plus = S.apply_diagonal(I.head(p)) * params.M_plus.cast<cplx>();
    const CMat minus = S.apply_diagonal(I.tail(p)) * params.M_minus.cast<cplx>();
    return (plus + minus).real();
}

CMat fourier_kernel_integral(double t, const FourierKernelParams& params, double X,
                             const QuadOptions& quad) {
    const auto p = params.dim();
    if (t == 0.0 || !(X > 0.0)) return CMat::Zero(p, p);
    const Spectral& S = require_diagonal(params.hurst);
    const CVec& lam = S.eigenvalues();
    auto f = [&](double x) -> QVec {
        QVec v(p);
        if (x <= 0.0) return QVec::Zero(p);
        const cplx e = fourier_factor(t, x);
        const double lx = std::log(x);
        for (Eigen::Index k = 0; k < p; ++k) v(k) = e * std::exp(-lam(k) * lx);
        return v;
    };
    auto fq = [&](QPoint u) -> QVec { return f(u.value()); };
    const double h = 1.0 / std::abs(t);
    QVec I = integrate_line(fq, p, 0.0, std::min(h, X), {}, h, quad).value;
    if (X > h) {
        const long n = static_cast<long>(std::ceil((X - h) / h));
        I += integrate_panels(f, p, h, X, n, quad).value;
    }
    return S.apply_diagonal(I) * params.A;
}

double time_kernel_fourth_power_integral(double t, const TimeKernelParams& params,
                                         const QuadOptions& quad) {
    if (params.dim() != 1) throw std::invalid_argument("fourth power integral is scalar-only");
    if (params.variant == TimeKernelParams::Variant::general && params.hurst.D(0, 0) <= -0.25) {
        throw FourthMomentDiverged("int g_t^4 diverges for d <= -1/4");
    }
    if (t == 0.0) return 0.0;
    auto f = [&](QPoint u) -> QVec {
        const double g = time_kernel(t, u, params)(0, 0);
        QVec v(1);
        v(0) = g * g * g * g;
        return v;
    };
    return integrate_line(f, 1, -kInf, kInf, {0.0, t}, line_scale(t, 0.0), quad).value(0).real();
}

}  // namespace oflm
