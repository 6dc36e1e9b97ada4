#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oflm/covariance.hpp"
#include "oflm/mcstats.hpp"
#include "oflm/simulate.hpp"

namespace oflm {

// H + (B - I/2): local exponent of a moving-average ofLm with tempered
// operator-stable noise of exponent B.
Mat hurst_local(const Mat& H, const Mat& B);
// H + (I/2 - B): large-scale exponent of the harmonizable counterpart.
Mat hurst_asymptotic(const Mat& H, const Mat& B);

// Throw HypothesisViolated naming the failing condition.
void check_local_hypotheses(const Mat& H, const Mat& B);
void check_asymptotic_hypotheses(const Mat& H, const CMat& A, const Mat& B);

struct MaModel {
    TimeKernelParams params;
    LevyMeasure mu;
};

struct RhModel {
    FourierKernelParams params;
    ComplexLevyView mu;
};

enum class LimitKind { ma_large, rh_small, ma_local, rh_large };
const char* to_string(LimitKind k);

struct RescaleRequest {
    LimitKind kind = LimitKind::ma_large;
    double scale = 1.0;              // c for the large-scale kinds, epsilon for the small ones
    std::vector<double> grid;        // reference times t
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    SimOptions sim{};
    // ma_local / rh_large: simulate the original process at scaled times instead
    // of the equivalent unit-scale process with rescaled tempering.
    bool direct = false;
};

// Paths of
//   ma_large: c^{-H} X(c t)                 rh_small: eps^{-H} X(eps t)
//   ma_local: eps^{-H1} X(eps t)            rh_large: c^{-H2} X(c t)
// on the reference grid (increments from s = 0; X(0) = 0).
Ensemble rescaled_ensemble(const RescaleRequest& req, const MaModel& model);
Ensemble rescaled_ensemble(const RescaleRequest& req, const RhModel& model);

struct GaussianLimitDistance {
    double cov_z = 0.0;     // max |cov_hat - cov| / se over all entries and time pairs
    double chf_distance = 0.0;  // max |chf_hat - exp(-u'Su/2)|
    double chf_ci = 0.0;        // 3 / sqrt(N)
    std::vector<KurtosisEstimate> kurtosis;  // per time, per coordinate (time-major)
};
// target is the p*n x p*n joint covariance of the limit over `times` (time-major blocks).
// u[k] holds one p-vector per time.
GaussianLimitDistance gaussian_limit_distance(const Ensemble& ens, const Mat& target,
                                              const std::vector<double>& times,
                                              const std::vector<std::vector<Vec>>& u);

// int z^4 mu(dz) for a scalar Levy measure.
double fourth_moment(const LevyMeasure& mu);

struct KurtosisRow {
    double scale = 0.0;
    double predicted = 0.0;
    double estimated = 0.0;
    double se = 0.0;
};
// Excess kurtosis of c^{-h} X(c t), p = 1: (int g_t^4)(int z^4 mu) / Var^2 / c.
double predicted_excess_kurtosis(const MaModel& model, double t, double c, const QuadOptions& quad = {});
// estimated is empty (0, 0) when replications == 0.
std::vector<KurtosisRow> kurtosis_scaling(const MaModel& model, double t, const std::vector<double>& scales,
                                          std::size_t replications, std::uint64_t seed, unsigned threads,
                                          const SimOptions& sim = {});

// int_0^inf (e^{i y r^b} - 1 - i y r^b) q(r) r^{-2} dr; q = 1 when `tempering` is null.
cplx stable_radial_symbol(double y, double b, const Tempering* tempering, const QuadOptions& quad = {});

// Characteristic function E exp(i sum_j <u_j, Y(t_j)>) of the operator-stable
// limit (q = 1) or, with tempered = true, of the process driven by mu itself.
// Needs r^B theta = r^b v for every sphere atom (scalar B, or atoms on eigenvectors).
cplx opstable_limit_chf(const std::vector<double>& times, const std::vector<Vec>& u, const MaModel& model,
                        bool tempered = false, const QuadOptions& quad = {});
cplx opstable_limit_chf(const std::vector<double>& times, const std::vector<Vec>& u, const RhModel& model,
                        bool tempered = false, const QuadOptions& quad = {});

}  // namespace oflm
