#pragma once

#include <vector>

#include "oflm/simulate.hpp"

namespace oflm {

// Pairwise (tree) summation; the order depends only on n.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

// Index of t in the ensemble grid (relative tolerance 1e-12).
std::size_t time_index(const Ensemble& ens, double t);

struct CovEstimate {
    Mat value;  // mean of X(t1) X(t2)^T, the processes being centred
    Mat se;     // jackknife standard errors
};
CovEstimate sample_cov(const Ensemble& ens, double t1, double t2);

struct MeanEstimate {
    Vec value, se;
};
MeanEstimate sample_mean(const Ensemble& ens, double t);

struct ChfEstimate {
    cplx value;
    double ci_radius = 0.0;  // 3 / sqrt(N)
};
// u[k] holds one p-vector per time; value k is mean exp(i sum_j <u[k][j], X(times[j])>).
std::vector<ChfEstimate> empirical_chf(const Ensemble& ens, const std::vector<double>& times,
                                       const std::vector<std::vector<Vec>>& u);

struct KurtosisEstimate {
    double value = 0.0;
    double se = 0.0;  // delta method
};
KurtosisEstimate excess_kurtosis(const Ensemble& ens, double t, Eigen::Index coordinate);
KurtosisEstimate excess_kurtosis(const std::vector<double>& x);

}  // namespace oflm
