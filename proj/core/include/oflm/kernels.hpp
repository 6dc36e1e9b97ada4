#pragma once

#include <vector>

#include "oflm/matfun.hpp"
#include "oflm/quadrature.hpp"

namespace oflm {

struct TimeKernelParams {
    enum class Variant { general, half };
    Variant variant = Variant::general;
    Mat M_plus, M_minus;  // general
    Mat M, N;             // half
    HurstSpec hurst;

    // Checks the regime matches the variant.
    static TimeKernelParams general(HurstSpec h, Mat Mp, Mat Mm);
    static TimeKernelParams half(HurstSpec h, Mat M, Mat N);

    Eigen::Index dim() const { return hurst.dim(); }
};

struct FourierKernelParams {
    CMat A;
    HurstSpec hurst;

    static FourierKernelParams make(HurstSpec h, CMat A);
    Eigen::Index dim() const { return hurst.dim(); }
};

// Per-eigenvalue scalar pieces of the time kernel (diagonalizable D only):
// plus(k)  = (t-s)_+^{l_k} - (-s)_+^{l_k},  minus(k) likewise with x_-.
struct ScalarKernelTerms {
    CVec plus, minus;
};
ScalarKernelTerms time_kernel_terms(double t, QPoint s, const CVec& lambda);
// Same, into preallocated vectors of size lambda.size().
void time_kernel_terms(double t, QPoint s, const CVec& lambda, CVec& plus, CVec& minus);

// (e^{itx} - 1) / (ix), finite at x = 0
cplx fourier_factor(double t, double x);

Mat time_kernel(double t, double s, const TimeKernelParams& params);
Mat time_kernel(double t, QPoint s, const TimeKernelParams& params);
CMat fourier_kernel(double t, double x, const FourierKernelParams& params);

double kernel_scaling_residual(double c, double t, const std::vector<double>& sample_points,
                               const TimeKernelParams& params);

struct FourierPairGrid {
    double S = 2048.0;
    long N = 1L << 20;
    double band_lo = 0.01;
    double band_hi = 10.0;
};

struct FourierPairReport {
    double residual = 0.0;  // max relative deviation over the band, both sides
    double worst_frequency = 0.0;
    long frequencies_compared = 0;
};

// DFT of the sampled kernels (t - .)_+^D - (-.)_+^D and the minus analogue
// against +-((e^{itx}-1)/(ix)) |x|^{-D} Gamma(D+I) e^{-+ sign(x) i pi D / 2}.
// Transform convention: F(f)(x) = int e^{isx} f(s) ds. The residual is
// relative to min(|t|, 2/|x|) |x|^{-D} Gamma(D+I), since e_t has zeros.
FourierPairReport verify_fourier_pair(double t, const HurstSpec& hurst,
                                      const FourierPairGrid& grid = {}, double bound = 1e-2);

// Closed form of the transform above for one side.
CMat fourier_pair_closed_form(double t, double x, const HurstSpec& hurst, Side side);

enum class Domain { time, fourier };

// int g_{t1}(u) g_{t2}(u)^* du over the line.
Mat kernel_l2_gram(double t1, double t2, const TimeKernelParams& params, Domain domain,
                   const QuadOptions& quad = {});
Mat kernel_l2_gram(double t1, double t2, const FourierKernelParams& params,
                   const QuadOptions& quad = {});

// A = Gamma(D+I) e^{-i pi D/2} M_+, only for M_- = 0.
FourierKernelParams fourier_from_time(const TimeKernelParams& params);

}  // namespace oflm
