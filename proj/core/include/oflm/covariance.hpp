#pragma once

#include <numbers>

#include "oflm/isometry.hpp"
#include "oflm/levy.hpp"

namespace oflm {

// Time-domain Gram of the kernel equals the Fourier-domain Gram divided by this.
inline constexpr double kParsevalConstant = 2.0 * std::numbers::pi;

Mat cov_maofLm(double s, double t, const TimeKernelParams& params, const LevyMeasure& mu,
               const QuadOptions& quad = {});
Mat cov_rhofLm(double s, double t, const FourierKernelParams& params, const ComplexLevyView& mu,
               const QuadOptions& quad = {});

// 1/2 { |s|^H S |s|^{H*} + |t|^H S |t|^{H*} - |t-s|^H S |t-s|^{H*} }
Mat cov_ofbm_reversible(double s, double t, const Mat& H, const Mat& Sigma);

struct OfbmMatch {
    Mat Q;        // symmetric square root of the jump second moment
    Mat H_prime;  // Q H Q^{-1}
};
OfbmMatch cov_matches_ofbm(const LevyMeasure& mu, const Mat& H);

struct ParsevalReport {
    double residual = 0.0;  // max entry |cov_ma - cov_rh|
    Mat cov_time, cov_fourier;
};
// Time parameters with M_- = 0 are converted to A = Gamma(D+I) e^{-i pi D/2} M_+.
// mu_time must satisfy int z z^T = I and mu_fourier 4 int Re z Re z^T = I = 4 int Im z Im z^T.
ParsevalReport parseval_residual(double s, double t, const TimeKernelParams& params,
                                 const LevyMeasure& mu_time, const ComplexLevyView& mu_fourier,
                                 const QuadOptions& quad = {});
// Same with unit atoms sum_k delta_{e_k} and sum_k delta_{(1+i) e_k / 2}.
ParsevalReport parseval_residual(double s, double t, const TimeKernelParams& params,
                                 const QuadOptions& quad = {});

// int 2 (1 - cos y) y^{-2} |y|^{-delta} dy over the line, delta in (-1, 1).
double properness_beta(double delta);
// |t|^{2 + 2(d1 + d2)} (beta(2 d1) beta(2 d2) - beta(d1 + d2)^2)
double properness_det(double d1, double d2, double t);

}  // namespace oflm
