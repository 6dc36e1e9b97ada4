#include "oflm/mcstats.hpp"

#include <cmath>

#include "oflm/errors.hpp"

namespace oflm {

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

namespace {

double mean_of(const std::vector<double>& x) { return pairwise_sum(x) / static_cast<double>(x.size()); }

// standard error of the mean; equals the jackknife estimate
double se_of_mean(const std::vector<double>& x, double mean) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - mean) * (x[i] - mean);
    const double n = static_cast<double>(x.size());
    return std::sqrt(pairwise_sum(d) / (n - 1.0) / n);
}

void need_replications(const Ensemble& ens, std::size_t n) {
    if (ens.replications() < n) {
        throw ValidationError("ensemble needs at least " + std::to_string(n) + " replications");
    }
}

}  // namespace

std::size_t time_index(const Ensemble& ens, double t) {
    for (std::size_t j = 0; j < ens.grid.size(); ++j) {
        if (std::abs(ens.grid[j] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return j;
    }
    throw TimesNotOnGrid("time " + std::to_string(t) + " is not on the ensemble grid");
}

CovEstimate sample_cov(const Ensemble& ens, double t1, double t2) {
    need_replications(ens, 2);
    const std::size_t i1 = time_index(ens, t1), i2 = time_index(ens, t2);
    const auto p = ens.dim();
    const std::size_t n = ens.replications();
    CovEstimate out{Mat::Zero(p, p), Mat::Zero(p, p)};
    std::vector<double> y(n);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            for (std::size_t r = 0; r < n; ++r) y[r] = ens.paths[r].values[i1](a) * ens.paths[r].values[i2](b);
            out.value(a, b) = mean_of(y);
            out.se(a, b) = se_of_mean(y, out.value(a, b));
        }
    }
    return out;
}

MeanEstimate sample_mean(const Ensemble& ens, double t) {
    need_replications(ens, 2);
    const std::size_t i = time_index(ens, t);
    const auto p = ens.dim();
    MeanEstimate out{Vec::Zero(p), Vec::Zero(p)};
    std::vector<double> y(ens.replications());
    for (Eigen::Index a = 0; a < p; ++a) {
        for (std::size_t r = 0; r < y.size(); ++r) y[r] = ens.paths[r].values[i](a);
        out.value(a) = mean_of(y);
        out.se(a) = se_of_mean(y, out.value(a));
    }
    return out;
}

std::vector<ChfEstimate> empirical_chf(const Ensemble& ens, const std::vector<double>& times,
                                       const std::vector<std::vector<Vec>>& u) {
    need_replications(ens, 1);
    std::vector<std::size_t> idx;
    for (double t : times) idx.push_back(time_index(ens, t));
    const std::size_t n = ens.replications();
    const double radius = 3.0 / std::sqrt(static_cast<double>(n));
    std::vector<ChfEstimate> out;
    std::vector<double> re(n), im(n);
    for (const auto& uk : u) {
        if (uk.size() != times.size()) throw ValidationError("one u-vector per time is required");
        for (std::size_t r = 0; r < n; ++r) {
            double arg = 0.0;
            for (std::size_t j = 0; j < idx.size(); ++j) arg += uk[j].dot(ens.paths[r].values[idx[j]]);
            re[r] = std::cos(arg);
            im[r] = std::sin(arg);
        }
        out.push_back({cplx(mean_of(re), mean_of(im)), radius});
    }
    return out;
}

KurtosisEstimate excess_kurtosis(const std::vector<double>& x) {
    if (x.size() < 100) throw ValidationError("excess kurtosis needs at least 100 replications");
    const double n = static_cast<double>(x.size());
    const double mu = mean_of(x);
    std::vector<double> d2(x.size()), d3(x.size()), d4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mu;
        d2[i] = d * d;
        d3[i] = d2[i] * d;
        d4[i] = d2[i] * d2[i];
    }
    const double m2 = pairwise_sum(d2) / n, m3 = pairwise_sum(d3) / n, m4 = pairwise_sum(d4) / n;
    if (!(m2 > 1e-24 * std::max(1.0, mu * mu))) throw DegenerateVariance("sample variance is zero");
    KurtosisEstimate k;
    k.value = m4 / (m2 * m2) - 3.0;
    // influence function of m4 / m2^2
    std::vector<double> psi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mu;
        psi[i] = (d4[i] - m4 - 4.0 * m3 * d) / (m2 * m2) - 2.0 * m4 * (d2[i] - m2) / (m2 * m2 * m2);
    }
    k.se = se_of_mean(psi, mean_of(psi));
    return k;
}

KurtosisEstimate excess_kurtosis(const Ensemble& ens, double t, Eigen::Index coordinate) {
    const std::size_t i = time_index(ens, t);
    if (coordinate < 0 || coordinate >= ens.dim()) throw ValidationError("coordinate out of range");
    std::vector<double> x(ens.replications());
    for (std::size_t r = 0; r < x.size(); ++r) x[r] = ens.paths[r].values[i](coordinate);
    return excess_kurtosis(x);
}

}  // namespace oflm
