#pragma once

#include <limits>
#include <vector>

#include "oflm/kernels.hpp"

namespace oflm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// int_lo^hi g_s(u) Sigma g_t(u)^T du
Mat time_isometry(double s, double t, const TimeKernelParams& params, const Mat& Sigma,
                  const QuadOptions& quad = {}, double lo = -kInf, double hi = kInf);

// 8 int_{x_lo}^inf (Re g~_s S11 Re g~_t^T + Im g~_s S22 Im g~_t^T) dx, x_lo >= 0.
// With x_lo = 0 this is the covariance of the 2Re-reduced harmonizable integral.
Mat fourier_isometry(double s, double t, const FourierKernelParams& params, const Mat& S11,
                     const Mat& S22, const QuadOptions& quad = {}, double x_lo = 0.0);

// Joint p*n x p*n matrices over a time grid; block (i,j) is the isometry at (t_i, t_j).
Mat time_isometry_grid(const std::vector<double>& grid, const TimeKernelParams& params,
                       const Mat& Sigma, const QuadOptions& quad = {}, double lo = -kInf,
                       double hi = kInf);
Mat fourier_isometry_grid(const std::vector<double>& grid, const FourierKernelParams& params,
                          const Mat& S11, const Mat& S22, const QuadOptions& quad = {},
                          double x_lo = 0.0);

// int_lo^hi g_t(u) du
Mat time_kernel_integral(double t, const TimeKernelParams& params, double lo, double hi,
                         const QuadOptions& quad = {});
// int_0^X g~_t(x) dx
CMat fourier_kernel_integral(double t, const FourierKernelParams& params, double X,
                             const QuadOptions& quad = {});

// p = 1: int g_t(u)^4 du
double time_kernel_fourth_power_integral(double t, const TimeKernelParams& params,
                                         const QuadOptions& quad = {});

}  // namespace oflm
