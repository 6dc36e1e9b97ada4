#include "oflm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oflm/errors.hpp"
#include "oflm/parallel.hpp"

namespace oflm {

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("time grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ValidationError("time grid must be strictly increasing");
    }
}

std::vector<Vec> zero_values(std::size_t n, Eigen::Index p) { return std::vector<Vec>(n, Vec::Zero(p)); }

double max_outside_fraction(const Mat& out_cov, const std::vector<double>& full_traces, Eigen::Index p) {
    double f = 0.0;
    for (std::size_t j = 0; j < full_traces.size(); ++j) {
        if (full_traces[j] <= 0.0) continue;
        const auto o = static_cast<Eigen::Index>(j) * p;
        f = std::max(f, out_cov.block(o, o, p, p).trace() / full_traces[j]);
    }
    return f;
}

void add_gaussian(const GaussianSampler& g, Rng& rng, std::vector<Vec>& values) {
    if (g.empty()) return;
    const Vec x = g.draw(rng);
    const auto p = values.front().size();
    for (std::size_t j = 0; j < values.size(); ++j) {
        values[j] += x.segment(static_cast<Eigen::Index>(j) * p, p);
    }
}

void pin_origin(const std::vector<double>& grid, std::vector<Vec>& values) {
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (grid[j] == 0.0) values[j].setZero();
}

}  // namespace

PoissonField sample_field(const JumpSampler& sampler, const Window& window, Rng& rng) {
    PoissonField f;
    f.window = window;
    f.intensity_mass = window.length() * sampler.activity();
    const std::uint64_t n = rng.poisson(f.intensity_mass);
    f.omega.resize(n);
    f.z.resize(sampler.dim(), static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        f.omega[i] = window.lo + window.length() * rng.uniform();
        sampler.sample_to(rng, f.z.col(static_cast<Eigen::Index>(i)));
    }
    return f;
}

PoissonField sample_field(const LevyMeasure& mu, const Window& window, Rng& rng) {
    return sample_field(JumpSampler(mu), window, rng);
}

GaussianSampler::GaussianSampler(const Mat& cov) {
    if (cov.rows() != cov.cols()) throw ValidationError("covariance must be square");
    const Mat S = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw NotPSD("covariance has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
    factor_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vec GaussianSampler::draw(Rng& rng) const {
    Vec n(factor_.cols());
    for (Eigen::Index i = 0; i < n.size(); ++i) n(i) = rng.normal();
    return factor_ * n;
}

// --- moving average -----------------------------------------------------------

MaSimulator::MaSimulator(TimeKernelParams params, LevyMeasure mu, std::vector<double> grid,
                         const SimOptions& opt)
    : params_(std::move(params)), mu_(std::move(mu)), sampler_(mu_), grid_(std::move(grid)) {
    check_grid(grid_);
    const auto p = params_.dim();
    if (mu_.dim() != p) throw ValidationError("Levy measure dimension must equal p");

    const double lo0 = std::min(0.0, grid_.front()), hi0 = std::max(0.0, grid_.back());
    const double span = hi0 - lo0 > 0.0 ? hi0 - lo0 : 1.0;
    const double half = opt.half_width.value_or(opt.margin * span);
    window_ = Window{lo0 - half, hi0 + half, 0.0};

    const Mat M2 = second_moment(mu_);
    Mat out = time_isometry_grid(grid_, params_, M2, opt.quad, -kInf, window_.lo) +
              time_isometry_grid(grid_, params_, M2, opt.quad, window_.hi, kInf);
    std::vector<double> full;
    for (double t : grid_) full.push_back(time_isometry(t, t, params_, M2, opt.quad).trace());
    window_.outside_fraction = max_outside_fraction(out, full, p);
    if (!opt.far_field && window_.outside_fraction > opt.window_budget) {
        throw WindowTooSmall("kernel mass outside the window is " + std::to_string(window_.outside_fraction) +
                             " of the total, budget " + std::to_string(opt.window_budget));
    }
    const auto n = static_cast<Eigen::Index>(grid_.size()) * p;
    gauss_cov_ = opt.far_field ? out : Mat::Zero(n, n);
    if (const auto* t = std::get_if<TemperedOpStable>(&mu_.variant()); t && t->gaussian_small_jumps) {
        gauss_cov_ += time_isometry_grid(grid_, params_, small_jump_moment(mu_), opt.quad, window_.lo, window_.hi);
    }
    if (gauss_cov_.cwiseAbs().maxCoeff() > 0.0) gauss_ = GaussianSampler(gauss_cov_);

    const Vec m = mean_jump(mu_, true);
    for (double t : grid_) {
        if (m.cwiseAbs().maxCoeff() == 0.0) {
            compensator_.push_back(Vec::Zero(p));
        } else {
            compensator_.push_back(time_kernel_integral(t, params_, window_.lo, window_.hi, opt.quad) * m);
        }
    }

    const Spectral& S = params_.hurst.spectral_D;
    fast_ = params_.variant == TimeKernelParams::Variant::general && S.diagonalizable();
    if (fast_) {
        P_ = S.P();
        Qp_ = S.Pinv() * params_.M_plus.cast<cplx>();
        Qm_ = S.Pinv() * params_.M_minus.cast<cplx>();
    }
}

void MaSimulator::accumulate(const PoissonField& field, std::vector<Vec>& out) const {
    const auto p = params_.dim();
    const auto n = static_cast<Eigen::Index>(field.size());
    if (n == 0) return;
    if (!fast_) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < grid_.size(); ++j) {
                if (grid_[j] != 0.0) out[j] += time_kernel(grid_[j], field.omega[i], params_) * field.z.col(i);
            }
        }
        return;
    }
    // Sum in the eigenbasis of D, one change of basis per time.
    const CVec& lam = params_.hurst.spectral_D.eigenvalues();
    const CMat a = Qp_ * field.z.cast<cplx>();
    const CMat b = Qm_ * field.z.cast<cplx>();
    CVec plus(p), minus(p), acc(p);
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        const double t = grid_[j];
        if (t == 0.0) continue;
        acc.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            time_kernel_terms(t, QPoint{field.omega[static_cast<std::size_t>(i)], 0.0}, lam, plus, minus);
            for (Eigen::Index k = 0; k < p; ++k) acc(k) += plus(k) * a(k, i) + minus(k) * b(k, i);
        }
        out[j] += (P_ * acc).real();
    }
}

SamplePath MaSimulator::path_from_field(const PoissonField& field) const {
    SamplePath sp;
    sp.grid = grid_;
    sp.values = zero_values(grid_.size(), params_.dim());
    accumulate(field, sp.values);
    for (std::size_t j = 0; j < grid_.size(); ++j) sp.values[j] -= compensator_[j];
    pin_origin(grid_, sp.values);
    return sp;
}

SamplePath MaSimulator::path(Rng& rng) const {
    const PoissonField field = sample_field(sampler_, window_, rng);
    SamplePath sp = path_from_field(field);
    add_gaussian(gauss_, rng, sp.values);
    pin_origin(grid_, sp.values);
    return sp;
}

// --- real harmonizable ----------------------------------------------------------

RhSimulator::RhSimulator(FourierKernelParams params, ComplexLevyView mu, std::vector<double> grid,
                         const SimOptions& opt)
    : params_(std::move(params)), mu_(std::move(mu)), sampler_(mu_.base), grid_(std::move(grid)) {
    check_grid(grid_);
    const auto p = params_.dim();
    if (mu_.p() != p) throw ValidationError("complex Levy measure must live on C^p");

    double tmin = 0.0;
    for (double t : grid_)
        if (t != 0.0) tmin = tmin == 0.0 ? std::abs(t) : std::min(tmin, std::abs(t));
    if (tmin == 0.0) tmin = 1.0;
    const double X = opt.half_width.value_or(opt.margin * 2.0 * std::numbers::pi / tmin);
    window_ = Window{-X, X, 0.0};

    const ComplexMoments cm = complex_moments(mu_);
    const Mat out = fourier_isometry_grid(grid_, params_, cm.S11, cm.S22, opt.quad, X);
    std::vector<double> full;
    for (double t : grid_) full.push_back(fourier_isometry(t, t, params_, cm.S11, cm.S22, opt.quad).trace());
    window_.outside_fraction = max_outside_fraction(out, full, p);
    if (!opt.far_field && window_.outside_fraction > opt.window_budget) {
        throw WindowTooSmall("kernel mass outside the window is " + std::to_string(window_.outside_fraction) +
                             " of the total, budget " + std::to_string(opt.window_budget));
    }
    const auto n = static_cast<Eigen::Index>(grid_.size()) * p;
    Mat cov = opt.far_field ? out : Mat::Zero(n, n);
    if (const auto* t = std::get_if<TemperedOpStable>(&mu_.base.variant()); t && t->gaussian_small_jumps) {
        const Mat sm = small_jump_moment(mu_.base);
        const Mat s11 = sm.topLeftCorner(p, p), s22 = sm.bottomRightCorner(p, p);
        cov += fourier_isometry_grid(grid_, params_, s11, s22, opt.quad) -
               fourier_isometry_grid(grid_, params_, s11, s22, opt.quad, X);
    }
    if (cov.cwiseAbs().maxCoeff() > 0.0) gauss_ = GaussianSampler(cov);

    const Vec m1 = mean_jump(mu_.base, true).head(p);
    for (double t : grid_) {
        if (m1.cwiseAbs().maxCoeff() == 0.0) {
            compensator_.push_back(Vec::Zero(p));
        } else {
            // the window integral of g~ is 2 Re int_0^X g~
            const Mat K = 2.0 * fourier_kernel_integral(t, params_, X, opt.quad).real();
            compensator_.push_back(2.0 * K * m1);
        }
    }

    const Spectral& S = params_.hurst.spectral_D;
    fast_ = S.diagonalizable();
    if (fast_) {
        P_ = S.P();
        QA_ = S.Pinv() * params_.A;
        QAc_ = S.Pinv() * params_.A.conjugate();
    }
}

void RhSimulator::accumulate(const PoissonField& field, std::vector<Vec>& out) const {
    const auto p = params_.dim();
    const auto n = static_cast<Eigen::Index>(field.size());
    if (n == 0) return;
    const cplx I(0.0, 1.0);
    if (!fast_) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = field.omega[static_cast<std::size_t>(i)];
            if (x == 0.0) continue;
            const CVec zeta = field.z.col(i).head(p).cast<cplx>() + I * field.z.col(i).tail(p).cast<cplx>();
            for (std::size_t j = 0; j < grid_.size(); ++j) {
                if (grid_[j] != 0.0) out[j] += 2.0 * (fourier_kernel(grid_[j], x, params_) * zeta).real();
            }
        }
        return;
    }
    const CVec& lam = params_.hurst.spectral_D.eigenvalues();
    const CMat zeta = field.z.topRows(p).cast<cplx>() + I * field.z.bottomRows(p).cast<cplx>();
    const CMat qa = QA_ * zeta, qac = QAc_ * zeta;
    // y_i = |x_i|^{-Lambda} Q A zeta_i in the eigenbasis of D
    CMat y(p, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = field.omega[static_cast<std::size_t>(i)];
        if (x == 0.0) {
            y.col(i).setZero();
            continue;
        }
        const double lx = std::log(std::abs(x));
        for (Eigen::Index k = 0; k < p; ++k) y(k, i) = std::exp(-lam(k) * lx) * (x > 0.0 ? qa(k, i) : qac(k, i));
    }
    CVec acc(p);
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        const double t = grid_[j];
        if (t == 0.0) continue;
        acc.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx e = fourier_factor(t, field.omega[static_cast<std::size_t>(i)]);
            for (Eigen::Index k = 0; k < p; ++k) acc(k) += e * y(k, i);
        }
        out[j] += 2.0 * (P_ * acc).real();
    }
}

SamplePath RhSimulator::path_from_field(const PoissonField& field) const {
    SamplePath sp;
    sp.grid = grid_;
    sp.values = zero_values(grid_.size(), params_.dim());
    accumulate(field, sp.values);
    for (std::size_t j = 0; j < grid_.size(); ++j) sp.values[j] -= compensator_[j];
    pin_origin(grid_, sp.values);
    return sp;
}

SamplePath RhSimulator::path(Rng& rng) const {
    const PoissonField field = sample_field(sampler_, window_, rng);
    SamplePath sp = path_from_field(field);
    add_gaussian(gauss_, rng, sp.values);
    pin_origin(grid_, sp.values);
    return sp;
}

// --- convenience ------------------------------------------------------------------

SamplePath maofLm_path(const TimeKernelParams& params, const LevyMeasure& mu,
                       const std::vector<double>& grid, Rng& rng, const SimOptions& opt) {
    return MaSimulator(params, mu, grid, opt).path(rng);
}

SamplePath rhofLm_path(const FourierKernelParams& params, const ComplexLevyView& mu,
                       const std::vector<double>& grid, Rng& rng, const SimOptions& opt) {
    return RhSimulator(params, mu, grid, opt).path(rng);
}

SamplePath ofbm_path(const Mat& gram, const std::vector<double>& grid, Rng& rng) {
    check_grid(grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (gram.rows() % n != 0) throw ValidationError("gram size is not a multiple of the grid size");
    const auto p = gram.rows() / n;
    SamplePath sp;
    sp.grid = grid;
    sp.values = zero_values(grid.size(), p);
    add_gaussian(GaussianSampler(gram), rng, sp.values);
    return sp;
}

Ensemble run_ensemble(std::size_t n, std::uint64_t seed, unsigned threads,
                      const std::function<SamplePath(Rng&)>& generate, const std::string& config_digest) {
    Ensemble ens;
    ens.config_digest = config_digest;
    ens.paths.resize(n);
    parallel_for(n, threads, [&](std::size_t r) {
        Rng rng(seed, r);
        SamplePath sp = generate(rng);
        sp.seed = seed;
        sp.replication = r;
        sp.config_digest = config_digest;
        ens.paths[r] = std::move(sp);
    });
    if (n > 0) ens.grid = ens.paths.front().grid;
    return ens;
}

}  // namespace oflm
