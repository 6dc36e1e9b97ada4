#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "oflm/matfun.hpp"
#include "oflm/rng.hpp"

namespace oflm {

struct Atom {
    Vec z;
    double w = 0.0;
};

struct Discrete {
    std::vector<Atom> atoms;
};

struct GaussianComponent {
    Mat Sigma;
    double rate = 0.0;
};

// rate * N(0, Sigma) jump law. Several components arise from conjugate
// symmetrisation, which does not preserve a single Gaussian.
struct GaussianJumps {
    std::vector<GaussianComponent> components;
};

struct Tempering {
    enum class Kind { indicator, exponential };
    Kind kind = Kind::indicator;
    double param = 1.0;  // r0 for 1{r <= r0}, c for e^{-c r}

    double operator()(double r) const {
        return kind == Kind::indicator ? (r <= param ? 1.0 : 0.0) : std::exp(-param * r);
    }
};

struct SphereAtom {
    Vec theta;  // unit vector
    double weight = 0.0;
    Tempering tempering;
};

// mu(dz) = sum_atoms weight * int_0^inf 1{r^B theta in dz} q(r) dr / r^2.
struct TemperedOpStable {
    Mat B;
    std::vector<SphereAtom> atoms;
    double epsilon = 1e-3;             // simulated jumps have r >= epsilon
    bool gaussian_small_jumps = false;  // replace r < epsilon by a Gaussian with the same covariance
    Spectral B_spectral;
};

class LevyMeasure {
public:
    using Variant = std::variant<Discrete, GaussianJumps, TemperedOpStable>;

    // dim is needed only for an empty atom list
    static LevyMeasure discrete(std::vector<Atom> atoms, Eigen::Index dim = -1);
    static LevyMeasure gaussian(const Mat& Sigma, double rate);
    static LevyMeasure gaussian_mixture(std::vector<GaussianComponent> comps);
    static LevyMeasure tempered(const Mat& B, std::vector<SphereAtom> atoms, double epsilon = 1e-3,
                                bool gaussian_small_jumps = false);

    Eigen::Index dim() const { return dim_; }
    const Variant& variant() const { return v_; }
    std::string kind() const;

private:
    LevyMeasure(Variant v, Eigen::Index dim) : v_(std::move(v)), dim_(dim) {}
    Variant v_;
    Eigen::Index dim_ = 0;
};

// z = (z1, z2) in R^{2p} read as z1 + i z2 in C^p.
struct ComplexLevyView {
    LevyMeasure base;

    static ComplexLevyView make(LevyMeasure m);
    Eigen::Index p() const { return base.dim() / 2; }
};

// int z z^T mu(dz)
Mat second_moment(const LevyMeasure& mu);
// (int Re z Re z^T, int Im z Im z^T, int Re z Im z^T)
struct ComplexMoments {
    Mat S11, S22, S12;
};
ComplexMoments complex_moments(const ComplexLevyView& mu);

// int z mu(dz); with truncated = true only the simulated part r >= epsilon of a
// tempered operator-stable measure is integrated.
Vec mean_jump(const LevyMeasure& mu, bool truncated = false);
// mu(R^q) of the simulated part.
double total_activity(const LevyMeasure& mu);
// int_{r < epsilon} z z^T mu(dz), zero for the finite-activity variants.
Mat small_jump_moment(const LevyMeasure& mu);

LevyMeasure pushforward(const LevyMeasure& mu, const Mat& T);
ComplexLevyView symmetrize_conjugate(const ComplexLevyView& mu);

// q(r) -> q(s r) in every sphere atom; identity for other variants.
LevyMeasure rescale_tempering(const LevyMeasure& mu, double s);

// Rescaled so that int z z^T = I.
LevyMeasure normalized_time(const LevyMeasure& mu);
// Rescaled so that 4 int Re z Re z^T = I = 4 int Im z Im z^T.
ComplexLevyView normalized_fourier(const ComplexLevyView& mu);

struct MeasureComparison {
    bool equal = false;
    double discrepancy = 0.0;
};
MeasureComparison measure_equal(const LevyMeasure& a, const LevyMeasure& b, double tol);

// int (e^{i<u,z>} - 1 - i<u,z>) mu(dz)
cplx levy_symbol(const LevyMeasure& mu, const Vec& u);

// Draws from the normalised simulated part mu / mu(R^q).
class JumpSampler {
public:
    explicit JumpSampler(const LevyMeasure& mu);
    double activity() const { return activity_; }
    Eigen::Index dim() const { return mu_.dim(); }
    Vec sample(Rng& rng) const;
    void sample_to(Rng& rng, Eigen::Ref<Vec> out) const;

private:
    LevyMeasure mu_;
    double activity_ = 0.0;
    std::vector<double> cumulative_;
    std::vector<Mat> factors_;  // Gaussian components
    // r^B theta = Re sum_k r^{beta_k} c_k per sphere atom
    CVec beta_;
    std::vector<std::vector<CVec>> polar_;
};

Vec sample_jump(const LevyMeasure& mu, Rng& rng);

// r^B theta for a tempered operator-stable measure.
Vec polar_point(const TemperedOpStable& m, double r, const Vec& theta);

// max over angles of the discrepancy between mu and mu(e^{i theta} .)
double rotation_invariance_report(const ComplexLevyView& mu, const std::vector<double>& thetas);

// Real 2p x 2p matrices of z -> conj(z) and z -> e^{i theta} z.
Mat conjugation_map(Eigen::Index p);
Mat rotation_map(Eigen::Index p, double theta);
// Real 2p x 2p matrix of z -> C z for complex C.
Mat realify(const CMat& C);

}  // namespace oflm
