#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "oflm/errors.hpp"
#include "oflm/isometry.hpp"
#include "oflm/kernels.hpp"

using namespace oflm;
using std::numbers::pi;

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Mat scalar(double x) { return Mat::Constant(1, 1, x); }

double pos(double x) { return x > 0.0 ? x : 0.0; }

// Mandelbrot-Van Ness constant: int ((1-s)_+^d - (-s)_+^d)^2 ds
double mvn_constant(double H) {
    return std::tgamma(H + 0.5) * std::tgamma(H + 0.5) / (std::tgamma(2 * H + 1) * std::sin(pi * H));
}

// x^D through Eigen's matrix exponential, zero for x <= 0.
Mat power_exp(double x, const Mat& D) {
    if (x <= 0.0) return Mat::Zero(D.rows(), D.cols());
    return (std::log(x) * D).exp();
}

QuadOptions tight() {
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.global_tol = 1e-10;
    return q;
}

}  // namespace

TEST(TimeKernel, ScalarDirectFormula) {
    const double d = 0.2;
    const auto params = TimeKernelParams::general(make_hurst(scalar(0.5 + d)), scalar(1.3), scalar(-0.4));
    for (double t : {1.0, -0.7, 2.5}) {
        for (double s : {-3.0, -0.2, 0.4, 0.9, 2.0, 4.0}) {
            const double plus = std::pow(pos(t - s), d) * (t - s > 0) - std::pow(pos(-s), d) * (-s > 0);
            const double minus = std::pow(pos(s - t), d) * (s - t > 0) - std::pow(pos(s), d) * (s > 0);
            EXPECT_NEAR(time_kernel(t, s, params)(0, 0), 1.3 * plus - 0.4 * minus, 1e-14) << t << " " << s;
        }
    }
}

TEST(TimeKernel, MatrixPowersViaExponential) {
    // complex pair of eigenvalues for D
    const Mat H = mat2(0.6, 0.25, -0.3, 0.55);
    const HurstSpec hs = make_hurst(H);
    const Mat Mp = mat2(1.0, 0.2, 0.3, 0.8), Mm = mat2(-0.5, 0.1, 0.0, 0.6);
    const auto params = TimeKernelParams::general(hs, Mp, Mm);
    for (double s : {-1.5, 0.3, 0.8, 2.2}) {
        const double t = 1.0;
        const Mat ref = (power_exp(t - s, hs.D) - power_exp(-s, hs.D)) * Mp +
                        (power_exp(s - t, hs.D) - power_exp(s, hs.D)) * Mm;
        EXPECT_LT((time_kernel(t, s, params) - ref).cwiseAbs().maxCoeff(), 1e-13) << s;
    }
}

TEST(TimeKernel, HalfVariantLogKernel) {
    const auto params = TimeKernelParams::half(make_hurst(scalar(0.5)), scalar(0.7), scalar(0.3));
    const double t = 1.0, s = -2.0;
    // sign(t-s) - sign(-s) = 0; log|t-s| - log|s|
    EXPECT_NEAR(time_kernel(t, s, params)(0, 0), 0.3 * std::log(3.0 / 2.0), 1e-15);
    EXPECT_NEAR(time_kernel(t, 0.5, params)(0, 0), 0.7 * 2.0 + 0.3 * std::log(0.5 / 0.5), 1e-15);
}

TEST(TimeKernel, ScalingIdentity) {
    const auto params = TimeKernelParams::general(make_hurst(mat2(0.7, 0.1, -0.05, 0.35)),
                                                  mat2(1.0, 0.2, 0.3, 0.9), mat2(0.4, 0.0, -0.2, 0.5));
    const std::vector<double> pts{-5.0, -1.0, -0.3, 0.2, 0.7, 1.4, 3.0};
    for (double c : {0.25, 3.0, 40.0}) EXPECT_LT(kernel_scaling_residual(c, 1.0, pts, params), 1e-12) << c;
}

TEST(TimeKernel, WrongVariantRejected) {
    EXPECT_THROW(TimeKernelParams::general(make_hurst(scalar(0.5)), scalar(1.0), scalar(0.0)), ValidationError);
    EXPECT_THROW(TimeKernelParams::half(make_hurst(scalar(0.7)), scalar(1.0), scalar(0.0)), ValidationError);
}

TEST(FourierFactor, LimitsAndValues) {
    EXPECT_DOUBLE_EQ(fourier_factor(1.7, 0.0).real(), 1.7);
    EXPECT_DOUBLE_EQ(fourier_factor(1.7, 0.0).imag(), 0.0);
    const cplx ref = (std::exp(cplx(0.0, 2.0)) - 1.0) / cplx(0.0, 1.0);
    EXPECT_LT(std::abs(fourier_factor(2.0, 1.0) - ref), 1e-15);
    // continuous through small x
    EXPECT_LT(std::abs(fourier_factor(1.0, 1e-9) - cplx(1.0, 5e-10)), 1e-15);
}

TEST(FourierKernel, HermitianAndZeroAtOrigin) {
    const CMat A = mat2(1.0, 0.3, -0.2, 0.8).cast<cplx>() + cplx(0, 1) * mat2(0.2, 0.0, 0.1, -0.4).cast<cplx>();
    const auto fp = FourierKernelParams::make(make_hurst(mat2(0.7, 0.1, -0.05, 0.35)), A);
    for (double x : {0.01, 0.5, 3.0}) {
        const CMat a = fourier_kernel(1.3, x, fp), b = fourier_kernel(1.3, -x, fp);
        EXPECT_LT((b - a.conjugate()).cwiseAbs().maxCoeff(), 1e-15) << x;
    }
    EXPECT_EQ(fourier_kernel(1.0, 0.0, fp).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FourierKernel, Scaling) {
    // g~_{ct}(x/c) = c c^D g~_t(x)
    const Mat H = mat2(0.7, 0.1, -0.05, 0.35);
    const HurstSpec hs = make_hurst(H);
    const auto fp = FourierKernelParams::make(hs, CMat::Identity(2, 2));
    for (double c : {0.5, 4.0}) {
        const CMat lhs = fourier_kernel(c * 1.2, 0.8 / c, fp);
        const CMat rhs = c * matrix_power(hs.D, c).cast<cplx>() * fourier_kernel(1.2, 0.8, fp);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13) << c;
    }
}

TEST(FourierPair, FftResidualNonDiagonal) {
    const HurstSpec hs = make_hurst(mat2(0.7, 0.1, -0.05, 0.35));
    const FourierPairReport rep = verify_fourier_pair(1.0, hs);
    EXPECT_LT(rep.residual, 1e-3);
    EXPECT_GT(rep.frequencies_compared, 100);
}

TEST(FourierPair, ClosedFormSymmetries) {
    const HurstSpec hs = make_hurst(mat2(0.7, 0.1, -0.05, 0.35));
    for (double x : {0.3, 2.0}) {
        for (double t : {1.0, 2.5}) {
            // transform of a real function
            const CMat p = fourier_pair_closed_form(t, x, hs, Side::plus);
            EXPECT_LT((fourier_pair_closed_form(t, -x, hs, Side::plus) - p.conjugate()).cwiseAbs().maxCoeff(), 1e-14);
            // minus-side kernel at (s; t) is the plus side at (-s; -t)
            const CMat m = fourier_pair_closed_form(t, x, hs, Side::minus);
            EXPECT_LT((m - fourier_pair_closed_form(-t, -x, hs, Side::plus)).cwiseAbs().maxCoeff(), 1e-14);
        }
    }
}

TEST(FourierPair, ScalarClosedFormValue) {
    // F[(t-.)_+^d - (-.)_+^d](x) = ((e^{itx}-1)/(ix)) |x|^{-d} Gamma(d+1) e^{-i sgn(x) pi d/2}
    const double d = 0.3, t = 1.0, x = 0.7;
    const cplx ref = fourier_factor(t, x) * std::pow(x, -d) * std::tgamma(d + 1) * std::exp(cplx(0, -pi * d / 2));
    const cplx v = fourier_pair_closed_form(t, x, make_hurst(scalar(0.5 + d)), Side::plus)(0, 0);
    EXPECT_LT(std::abs(v - ref), 1e-14);
}

TEST(Gram, MandelbrotVanNessConstant) {
    const QuadOptions q = tight();
    for (double H : {0.3, 0.7, 0.85}) {
        const auto params = TimeKernelParams::general(make_hurst(scalar(H)), scalar(1.0), scalar(0.0));
        const double C = mvn_constant(H);
        EXPECT_NEAR(kernel_l2_gram(1.0, 1.0, params, Domain::time, q)(0, 0), C, 1e-8 * C) << H;
        const double s = 0.6, t = 1.9;
        const double cov = 0.5 * C * (std::pow(s, 2 * H) + std::pow(t, 2 * H) - std::pow(t - s, 2 * H));
        EXPECT_NEAR(kernel_l2_gram(s, t, params, Domain::time, q)(0, 0), cov, 1e-8) << H;
        // raw Fourier-side integral carries the factor 2 pi
        EXPECT_NEAR(kernel_l2_gram(1.0, 1.0, fourier_from_time(params), q)(0, 0), 2 * pi * C, 1e-7) << H;
        EXPECT_NEAR(kernel_l2_gram(1.0, 1.0, params, Domain::fourier, q)(0, 0), C, 1e-8) << H;
    }
}

TEST(Gram, TimeAndFourierDomainsAgreeForMatrixKernel) {
    const QuadOptions q = tight();
    const auto params = TimeKernelParams::general(make_hurst(mat2(0.7, 0.1, -0.05, 0.35)),
                                                  mat2(1.0, 0.2, 0.3, 0.9), Mat::Zero(2, 2));
    const Mat gt = kernel_l2_gram(1.0, 2.0, params, Domain::time, q);
    const Mat gf = kernel_l2_gram(1.0, 2.0, params, Domain::fourier, q);
    EXPECT_LT((gf - gt).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_THROW(kernel_l2_gram(1.0, 2.0,
                                TimeKernelParams::general(params.hurst, params.M_plus, params.M_plus),
                                Domain::fourier, q),
                 UnlinkedParams);
}

TEST(Gram, FourierFromTimeMatchesClosedForm) {
    const HurstSpec hs = make_hurst(mat2(0.7, 0.1, -0.05, 0.35));
    const Mat Mp = mat2(1.0, 0.2, 0.3, 0.9);
    const auto fp = fourier_from_time(TimeKernelParams::general(hs, Mp, Mat::Zero(2, 2)));
    const CMat ref = fourier_pair_closed_form(1.4, 0.9, hs, Side::plus) * Mp.cast<cplx>();
    EXPECT_LT((fourier_kernel(1.4, 0.9, fp) - ref).cwiseAbs().maxCoeff(), 1e-13);
}
