#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oflm/isometry.hpp"
#include "oflm/kernels.hpp"
#include "oflm/levy.hpp"
#include "oflm/rng.hpp"

namespace oflm {

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    // Share of the kernel's L2 mass (max over grid times) lying outside [lo, hi].
    double outside_fraction = 0.0;

    double length() const { return hi - lo; }
};

struct PoissonField {
    std::vector<double> omega;
    Mat z;  // column i is the jump at omega[i]
    double intensity_mass = 0.0;  // length * activity
    Window window;

    std::size_t size() const { return omega.size(); }
};

struct SamplePath {
    std::vector<double> grid;
    std::vector<Vec> values;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::string config_digest;
};

struct SimOptions {
    // Window half-width is margin * (time span) for the time domain and
    // margin * 2 pi / min |t| for the frequency domain, unless given explicitly.
    double margin = 64.0;
    std::optional<double> half_width;
    // Replace the field outside the window by a Gaussian with the same covariance.
    bool far_field = true;
    double window_budget = 1e-4;
    QuadOptions quad{};
};

PoissonField sample_field(const JumpSampler& sampler, const Window& window, Rng& rng);
PoissonField sample_field(const LevyMeasure& mu, const Window& window, Rng& rng);

// Joint Gaussian draws with a fixed PSD covariance (symmetric eigen factor).
class GaussianSampler {
public:
    GaussianSampler() = default;
    explicit GaussianSampler(const Mat& cov);
    Vec draw(Rng& rng) const;
    Eigen::Index size() const { return factor_.rows(); }
    bool empty() const { return factor_.size() == 0; }

private:
    Mat factor_;
};

// Moving-average ofLm on a grid: Poisson jumps inside the window, deterministic
// compensator, and a Gaussian for the far field and any small-jump substitute.
class MaSimulator {
public:
    MaSimulator(TimeKernelParams params, LevyMeasure mu, std::vector<double> grid,
                const SimOptions& opt = {});

    SamplePath path(Rng& rng) const;
    // Deterministic part only: jumps of `field`, minus the compensator.
    SamplePath path_from_field(const PoissonField& field) const;

    const Window& window() const { return window_; }
    const std::vector<double>& grid() const { return grid_; }
    const Mat& gaussian_covariance() const { return gauss_cov_; }

private:
    void accumulate(const PoissonField& field, std::vector<Vec>& out) const;

    TimeKernelParams params_;
    LevyMeasure mu_;
    JumpSampler sampler_;
    std::vector<double> grid_;
    Window window_;
    std::vector<Vec> compensator_;
    Mat gauss_cov_;
    GaussianSampler gauss_;
    bool fast_ = false;
    CMat P_, Qp_, Qm_;
};

// Real-harmonizable ofLm through 2 Re(g~_t(x) z) over a symmetric frequency window.
class RhSimulator {
public:
    RhSimulator(FourierKernelParams params, ComplexLevyView mu, std::vector<double> grid,
                const SimOptions& opt = {});

    SamplePath path(Rng& rng) const;
    SamplePath path_from_field(const PoissonField& field) const;

    const Window& window() const { return window_; }
    const std::vector<double>& grid() const { return grid_; }

private:
    void accumulate(const PoissonField& field, std::vector<Vec>& out) const;

    FourierKernelParams params_;
    ComplexLevyView mu_;
    JumpSampler sampler_;
    std::vector<double> grid_;
    Window window_;
    std::vector<Vec> compensator_;
    GaussianSampler gauss_;
    bool fast_ = false;
    CMat P_, QA_, QAc_;
};

SamplePath maofLm_path(const TimeKernelParams& params, const LevyMeasure& mu,
                       const std::vector<double>& grid, Rng& rng, const SimOptions& opt = {});
SamplePath rhofLm_path(const FourierKernelParams& params, const ComplexLevyView& mu,
                       const std::vector<double>& grid, Rng& rng, const SimOptions& opt = {});
// gram is the p*n x p*n joint covariance, time-major blocks.
SamplePath ofbm_path(const Mat& gram, const std::vector<double>& grid, Rng& rng);

struct Ensemble {
    std::vector<double> grid;
    std::vector<SamplePath> paths;
    std::string config_digest;

    std::size_t replications() const { return paths.size(); }
    Eigen::Index dim() const { return paths.empty() ? 0 : paths.front().values.front().size(); }
};

// Replication r draws from Rng(seed, r); the result does not depend on threads.
Ensemble run_ensemble(std::size_t n, std::uint64_t seed, unsigned threads,
                      const std::function<SamplePath(Rng&)>& generate,
                      const std::string& config_digest = {});

}  // namespace oflm
