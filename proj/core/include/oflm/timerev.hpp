#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oflm/kernels.hpp"
#include "oflm/levy.hpp"
#include "oflm/mcstats.hpp"

namespace oflm {

inline constexpr double kReversibilityTol = 1e-9;

enum class Verdict { reversible, irreversible };
const char* to_string(Verdict v);

struct ReversibilityReport {
    double condition_a_residual = 0.0;
    double condition_b_residual = 0.0;
    // kernel identity g_{-t}(s) z = g_t(-s) M_-^{-1} M_+ z at sampled points
    std::optional<double> kernel_residual;
    Verdict verdict = Verdict::irreversible;
    std::vector<std::string> caveats;
};

// Moving-average ofLm. (a): M_-^{-1} M_+ and M_+^{-1} M_- agree on the support;
// (b): M_-^{-1} M_+ preserves mu.
ReversibilityReport check_maofLm(const Mat& Mp, const Mat& Mm, const LevyMeasure& mu,
                                 double tol = kReversibilityTol);
ReversibilityReport check_maofLm(const TimeKernelParams& params, const LevyMeasure& mu,
                                 double tol = kReversibilityTol);

// Real-harmonizable ofLm: -conj(A)^{-1} A preserves the conjugate-symmetrised measure.
ReversibilityReport check_rhofLm(const CMat& A, const ComplexLevyView& mu,
                                 double tol = kReversibilityTol);

struct ParametricCheck {
    double residual = 0.0;
    Verdict verdict = Verdict::irreversible;
};
// Gaussian case, time domain: cos(pi D/2) W U^T sin(pi D^T/2) symmetric, U = M_+ + M_-, W = M_+ - M_-.
ParametricCheck check_ofbm_time(const Mat& Mp, const Mat& Mm, const Mat& D, double tol = kReversibilityTol);
// Gaussian case, Fourier domain: A A^* real.
ParametricCheck check_ofbm_fourier(const CMat& A, double tol = kReversibilityTol);

struct OrthogonalFactor {
    Mat O;  // Sigma^{-1/2} M_-^{-1} M_+ Sigma^{1/2}
    double orthogonality_residual = 0.0;  // |O O^T - I|
    double symmetry_residual = 0.0;       // |O - O^T|
};
OrthogonalFactor symmetric_orthogonal_factor(const Mat& Mp, const Mat& Mm, const Mat& Sigma);

struct StringencyExample {
    Mat D, M_plus, M_minus;
    LevyMeasure mu;
    double ofbm_residual = 0.0;
    double condition_a_residual = 0.0;
    int attempts = 0;
};
// Random p = 2 pair satisfying the Gaussian time-domain condition while violating
// condition (a) for a discrete measure with identity second moment.
StringencyExample find_stringency_example(const Mat& D, std::uint64_t seed, int max_attempts = 1000);

struct EmpiricalReversibility {
    std::vector<double> discrepancies;  // |phi_fwd - phi_rev| per u
    double max_discrepancy = 0.0;
    double ci = 0.0;  // 3/sqrt(N_fwd) + 3/sqrt(N_rev)
    bool violation = false;
};
// ens_reversed holds Y(t) = X(-t) on the same grid as ens_forward.
EmpiricalReversibility empirical_reversibility(const Ensemble& ens_forward, const Ensemble& ens_reversed,
                                               const std::vector<double>& times,
                                               const std::vector<std::vector<Vec>>& u);

// Relabels an ensemble simulated on the grid -G into Y(t) = X(-t) on G.
Ensemble time_reversed(const Ensemble& ens_on_negated_grid);

}  // namespace oflm
