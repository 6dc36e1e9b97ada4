#include "oflm/timerev.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "oflm/errors.hpp"

namespace oflm {

namespace {

constexpr const char* kMinimalityCaveat =
    "verdict assumes the representation is minimal; minimality is not verified";

template <class M>
void require_invertible(const M& X, const char* name, bool complex_case) {
    Eigen::FullPivLU<M> lu(X);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        const std::string msg = std::string(name) + " is singular";
        if (complex_case) throw SingularA(msg);
        throw SingularM(msg);
    }
}

double support_residual(const Mat& T1, const Mat& T2, const LevyMeasure& mu) {
    if (const auto* d = std::get_if<Discrete>(&mu.variant())) {
        double r = 0.0;
        for (const auto& a : d->atoms) r = std::max(r, ((T1 - T2) * a.z).norm());
        return r;
    }
    // full-dimensional support: operator level
    return (T1 - T2).norm();
}

}  // namespace

const char* to_string(Verdict v) { return v == Verdict::reversible ? "reversible" : "irreversible"; }

ReversibilityReport check_maofLm(const Mat& Mp, const Mat& Mm, const LevyMeasure& mu, double tol) {
    if (Mp.rows() != mu.dim() || Mm.rows() != mu.dim()) throw ValidationError("dimension mismatch");
    require_invertible(Mp, "M_plus", false);
    require_invertible(Mm, "M_minus", false);
    const Mat T1 = Mm.fullPivLu().solve(Mp);
    const Mat T2 = Mp.fullPivLu().solve(Mm);
    ReversibilityReport r;
    r.condition_a_residual = support_residual(T1, T2, mu);
    r.condition_b_residual = measure_equal(mu, pushforward(mu, T1), tol).discrepancy;
    r.verdict = r.condition_a_residual < tol && r.condition_b_residual < tol ? Verdict::reversible
                                                                             : Verdict::irreversible;
    r.caveats.push_back(kMinimalityCaveat);
    return r;
}

ReversibilityReport check_maofLm(const TimeKernelParams& params, const LevyMeasure& mu, double tol) {
    if (params.variant != TimeKernelParams::Variant::general) {
        throw ValidationError("reversibility check needs the general moving-average kernel");
    }
    ReversibilityReport r = check_maofLm(params.M_plus, params.M_minus, mu, tol);
    const Mat T1 = params.M_minus.fullPivLu().solve(params.M_plus);
    std::vector<Vec> zs;
    if (const auto* d = std::get_if<Discrete>(&mu.variant())) {
        for (const auto& a : d->atoms) zs.push_back(a.z);
    } else {
        for (Eigen::Index k = 0; k < mu.dim(); ++k) zs.push_back(Vec::Unit(mu.dim(), k));
    }
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
        for (double s : {-3.1, -1.3, -0.4, 0.2, 0.7, 1.6, 2.9}) {
            const Mat lhs = time_kernel(-t, s, params);
            const Mat rhs = time_kernel(t, -s, params) * T1;
            for (const Vec& z : zs) worst = std::max(worst, ((lhs - rhs) * z).norm());
        }
    }
    r.kernel_residual = worst;
    return r;
}

ReversibilityReport check_rhofLm(const CMat& A, const ComplexLevyView& mu, double tol) {
    if (A.rows() != mu.p()) throw ValidationError("dimension mismatch");
    require_invertible(A, "A", true);
    const CMat C = -A.conjugate().fullPivLu().solve(A);
    const ComplexLevyView sym = symmetrize_conjugate(mu);
    ReversibilityReport r;
    r.condition_b_residual = measure_equal(sym.base, pushforward(sym.base, realify(C)), tol).discrepancy;
    r.verdict = r.condition_b_residual < tol ? Verdict::reversible : Verdict::irreversible;
    r.caveats.push_back(kMinimalityCaveat);
    return r;
}

ParametricCheck check_ofbm_time(const Mat& Mp, const Mat& Mm, const Mat& D, double tol) {
    const CMat e = matrix_phase(D, -1);  // exp(i pi D / 2)
    const Mat C = e.real(), S = e.imag();
    // the minus-side transform carries e^{+i pi D/2} with a negative sign, so the
    // imaginary part of the spectral density is C W U^T S^T - S U W^T C^T
    const Mat U = Mp + Mm, W = Mp - Mm;
    const Mat lhs = C * W * U.transpose() * S.transpose();
    const Mat rhs = S * U * W.transpose() * C.transpose();
    ParametricCheck out;
    out.residual = (lhs - rhs).norm();
    out.verdict = out.residual < tol ? Verdict::reversible : Verdict::irreversible;
    return out;
}

ParametricCheck check_ofbm_fourier(const CMat& A, double tol) {
    const CMat G = A * A.adjoint();
    ParametricCheck out;
    out.residual = (G - G.conjugate()).norm();
    out.verdict = out.residual < tol ? Verdict::reversible : Verdict::irreversible;
    return out;
}

OrthogonalFactor symmetric_orthogonal_factor(const Mat& Mp, const Mat& Mm, const Mat& Sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Sigma + Sigma.transpose()));
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw RankDeficientSigma("Sigma is not of full rank");
    }
    require_invertible(Mm, "M_minus", false);
    const auto p = Sigma.rows();
    OrthogonalFactor f;
    f.O = psd_inv_sqrt(Sigma) * Mm.fullPivLu().solve(Mp) * psd_sqrt(Sigma);
    f.orthogonality_residual = (f.O * f.O.transpose() - Mat::Identity(p, p)).norm();
    f.symmetry_residual = (f.O - f.O.transpose()).norm();
    return f;
}

StringencyExample find_stringency_example(const Mat& D, std::uint64_t seed, int max_attempts) {
    const auto p = D.rows();
    const CMat e = matrix_phase(D, -1);
    const Mat C = e.real(), S = e.imag();
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<Atom> atoms;
    for (Eigen::Index k = 0; k < p; ++k) atoms.push_back({Vec::Unit(p, k), 1.0});
    const LevyMeasure mu = LevyMeasure::discrete(atoms);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        Mat W(p, p), Y(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j) {
                W(i, j) = nd(gen);
                Y(i, j) = nd(gen);
            }
        Y = (0.5 * (Y + Y.transpose())).eval();
        // C W U^T S^T = Y, which is symmetric
        const Mat U = S.fullPivLu().solve(Y) * C.transpose().fullPivLu().inverse() *
                      W.transpose().fullPivLu().inverse();
        const Mat Mp = 0.5 * (U + W), Mm = 0.5 * (U - W);
        if (std::abs(Mp.determinant()) < 1e-3 || std::abs(Mm.determinant()) < 1e-3) continue;
        const ParametricCheck g = check_ofbm_time(Mp, Mm, D);
        const ReversibilityReport l = check_maofLm(Mp, Mm, mu);
        if (g.verdict == Verdict::reversible && l.condition_a_residual > 1e-3) {
            return {D, Mp, Mm, mu, g.residual, l.condition_a_residual, attempt};
        }
    }
    throw ValidationError("no stringency example found within the attempt budget");
}

EmpiricalReversibility empirical_reversibility(const Ensemble& fwd, const Ensemble& rev,
                                               const std::vector<double>& times,
                                               const std::vector<std::vector<Vec>>& u) {
    if (fwd.grid != rev.grid) throw MismatchedEnsembles("ensembles live on different grids");
    if (fwd.replications() != rev.replications()) {
        throw MismatchedEnsembles("ensembles have different replication counts");
    }
    const auto a = empirical_chf(fwd, times, u);
    const auto b = empirical_chf(rev, times, u);
    EmpiricalReversibility out;
    out.ci = a.front().ci_radius + b.front().ci_radius;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::abs(a[k].value - b[k].value);
        out.discrepancies.push_back(d);
        out.max_discrepancy = std::max(out.max_discrepancy, d);
    }
    out.violation = out.max_discrepancy > out.ci;
    return out;
}

Ensemble time_reversed(const Ensemble& ens) {
    Ensemble out;
    out.config_digest = ens.config_digest;
    const std::size_t n = ens.grid.size();
    for (std::size_t j = 0; j < n; ++j) out.grid.push_back(-ens.grid[n - 1 - j]);
    out.paths.reserve(ens.paths.size());
    for (const auto& p : ens.paths) {
        SamplePath q = p;
        q.grid = out.grid;
        for (std::size_t j = 0; j < n; ++j) q.values[j] = p.values[n - 1 - j];
        out.paths.push_back(std::move(q));
    }
    return out;
}

}  // namespace oflm
