#include "oflm/matfun.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oflm/errors.hpp"

namespace oflm {

namespace {

struct EigenData {
    CVec eig;
    CMat V;
    double cond;
};

EigenData eigen_data(const CMat& M) {
    Eigen::ComplexEigenSolver<CMat> es(M);
    if (es.info() != Eigen::Success) {
        throw NonDiagonalizableWithoutJordanInput("eigen-decomposition failed");
    }
    EigenData out{es.eigenvalues(), es.eigenvectors(), 0.0};
    Eigen::JacobiSVD<CMat> svd(out.V);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    out.cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    return out;
}

double jordan_condition(const CMat& P) {
    Eigen::JacobiSVD<CMat> svd(P);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

CMat jordan_matrix(const JordanForm& jf) {
    Eigen::Index n = 0;
    for (const auto& b : jf.blocks) n += b.size;
    CMat J = CMat::Zero(n, n);
    Eigen::Index off = 0;
    for (const auto& b : jf.blocks) {
        for (int i = 0; i < b.size; ++i) {
            J(off + i, off + i) = b.eigenvalue;
            if (i > 0) J(off + i, off + i - 1) = 1.0;
        }
        off += b.size;
    }
    return J;
}

Regime classify(const std::vector<cplx>& eig, const Mat& H) {
    const Eigen::Index p = H.rows();
    const double dev = (H - 0.5 * Mat::Identity(p, p)).cwiseAbs().maxCoeff();
    if (dev <= kHalfIdentityTol) return Regime::half_identity;
    bool all_upper = true;
    for (const auto& e : eig) {
        if (std::abs(e.real() - 0.5) <= kHalfIdentityTol) return Regime::crosses_half_line;
        if (e.real() <= 0.5) all_upper = false;
    }
    return all_upper ? Regime::upper : Regime::general;
}

void check_range(const std::vector<cplx>& eig) {
    for (const auto& e : eig) {
        if (!(e.real() > 0.0 && e.real() < 1.0)) {
            std::ostringstream os;
            os << "eigenvalue " << e.real();
            if (e.imag() != 0.0) os << (e.imag() > 0 ? "+" : "") << e.imag() << "i";
            os << " has real part outside (0,1)";
            throw EigenvalueOutOfRange(os.str());
        }
    }
}

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::general: return "general";
        case Regime::half_identity: return "half_identity";
        case Regime::crosses_half_line: return "crosses_half_line";
        case Regime::upper: return "upper";
    }
    return "?";
}

Spectral Spectral::diagonalize(const CMat& M, double cond_cap) {
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix must be square");
    EigenData ed = eigen_data(M);
    if (!(ed.cond <= cond_cap)) {
        std::ostringstream os;
        os << "eigenvector condition number " << ed.cond << " exceeds cap " << cond_cap
           << "; supply an explicit Jordan factorisation";
        throw NonDiagonalizableWithoutJordanInput(os.str());
    }
    Spectral s;
    s.P_ = ed.V;
    s.Pinv_ = ed.V.partialPivLu().inverse();
    s.eig_ = ed.eig;
    s.cond_ = ed.cond;
    s.diagonalizable_ = true;
    for (Eigen::Index i = 0; i < ed.eig.size(); ++i) s.blocks_.push_back({ed.eig(i), 1});
    return s;
}

Spectral Spectral::from_jordan(const JordanForm& jf) {
    Spectral s;
    s.P_ = jf.P;
    s.Pinv_ = jf.P.partialPivLu().inverse();
    s.blocks_ = jf.blocks;
    s.cond_ = jordan_condition(jf.P);
    s.diagonalizable_ = true;
    Eigen::Index n = 0;
    for (const auto& b : jf.blocks) {
        n += b.size;
        if (b.size > 1) s.diagonalizable_ = false;
    }
    if (n != jf.P.rows() || jf.P.rows() != jf.P.cols()) {
        throw std::invalid_argument("Jordan blocks do not match the size of P");
    }
    s.eig_.resize(n);
    Eigen::Index off = 0;
    for (const auto& b : jf.blocks) {
        for (int i = 0; i < b.size; ++i) s.eig_(off + i) = b.eigenvalue;
        off += b.size;
    }
    return s;
}

CMat Spectral::apply_diagonal(const CVec& values) const {
    return P_ * values.asDiagonal() * Pinv_;
}

Spectral Spectral::shifted(cplx s) const {
    Spectral out = *this;
    for (auto& b : out.blocks_) b.eigenvalue += s;
    out.eig_.array() += s;
    return out;
}

SpectralReport validate_hurst(const Mat& H, double cond_cap) {
    if (H.rows() != H.cols() || H.rows() == 0) throw std::invalid_argument("H must be square");
    EigenData ed = eigen_data(H.cast<cplx>());
    SpectralReport rep;
    rep.eigenvalues.assign(ed.eig.data(), ed.eig.data() + ed.eig.size());
    check_range(rep.eigenvalues);
    rep.condition_number = ed.cond;
    if (!(ed.cond <= cond_cap)) {
        std::ostringstream os;
        os << "eigenvector condition number " << ed.cond << " exceeds cap " << cond_cap;
        throw NonDiagonalizableWithoutJordanInput(os.str());
    }
    rep.regime = classify(rep.eigenvalues, H);
    return rep;
}

SpectralReport validate_hurst(const Mat& H, const JordanForm& jf) {
    const CMat J = jordan_matrix(jf);
    if (J.rows() != H.rows()) throw std::invalid_argument("Jordan form size mismatch");
    const CMat rebuilt = jf.P * J * jf.P.partialPivLu().inverse();
    const double err = (rebuilt - H.cast<cplx>()).cwiseAbs().maxCoeff();
    if (err > 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("Jordan factorisation does not reproduce H");
    }
    SpectralReport rep;
    for (const auto& b : jf.blocks)
        for (int i = 0; i < b.size; ++i) rep.eigenvalues.push_back(b.eigenvalue);
    check_range(rep.eigenvalues);
    rep.condition_number = jordan_condition(jf.P);
    rep.regime = classify(rep.eigenvalues, H);
    return rep;
}

namespace {

HurstSpec finish_hurst(const Mat& H, SpectralReport rep, Spectral sH, bool jordan) {
    HurstSpec hs;
    hs.H = H;
    hs.D = H - 0.5 * Mat::Identity(H.rows(), H.cols());
    for (const auto& e : rep.eigenvalues) hs.eig_real_parts.push_back(e.real());
    hs.jordan = jordan;
    hs.report = std::move(rep);
    hs.spectral_D = sH.shifted(-0.5);
    return hs;
}

}  // namespace

HurstSpec make_hurst(const Mat& H, double cond_cap) {
    SpectralReport rep = validate_hurst(H, cond_cap);
    return finish_hurst(H, std::move(rep), Spectral::diagonalize(H.cast<cplx>(), cond_cap), false);
}

HurstSpec make_hurst(const Mat& H, const JordanForm& jf) {
    SpectralReport rep = validate_hurst(H, jf);
    return finish_hurst(H, std::move(rep), Spectral::from_jordan(jf), true);
}

CMat matrix_power(const CMat& M, double c) {
    if (!(c > 0.0)) throw NonPositiveBase("base must be positive, got " + std::to_string(c));
    if (c == 1.0) return CMat::Identity(M.rows(), M.cols());
    const CMat L = std::log(c) * M;
    return L.exp();
}

Mat matrix_power(const Mat& M, double c) {
    if (!(c > 0.0)) throw NonPositiveBase("base must be positive, got " + std::to_string(c));
    if (c == 1.0) return Mat::Identity(M.rows(), M.cols());
    const Mat L = std::log(c) * M;
    return L.exp();
}

CMat matrix_power(const Spectral& S, double c) {
    if (!(c > 0.0)) throw NonPositiveBase("base must be positive, got " + std::to_string(c));
    const double lc = std::log(c);
    return S.apply([lc](cplx lam, int k) { return std::pow(lc, k) * std::exp(lam * lc); });
}

Mat truncated_matrix_power(double t, const Mat& D, Side side) {
    if (side == Side::plus && t > 0.0) return matrix_power(D, t);
    if (side == Side::minus && t < 0.0) return matrix_power(D, -t);
    return Mat::Zero(D.rows(), D.cols());
}

namespace {

void check_gamma_poles(const CVec& eig) {
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        const cplx z = eig(i);
        const double r = std::round(z.real());
        if (r <= 0.0 && std::abs(z - cplx(r, 0.0)) < 1e-12) {
            throw PoleOfGamma("eigenvalue at non-positive integer " + std::to_string(r));
        }
    }
}

}  // namespace

CMat matrix_gamma(const CMat& M, double cond_cap) {
    const Spectral S = Spectral::diagonalize(M, cond_cap);
    check_gamma_poles(S.eigenvalues());
    CVec vals(S.eigenvalues().size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = gamma(S.eigenvalues()(i));
    return S.apply_diagonal(vals);
}

CMat matrix_gamma(const JordanForm& jf) {
    for (const auto& b : jf.blocks) {
        if (b.size > 3) throw UnsupportedStructure("matrix_gamma supports Jordan blocks up to size 3");
    }
    const Spectral S = Spectral::from_jordan(jf);
    check_gamma_poles(S.eigenvalues());
    return S.apply([](cplx lam, int k) { return gamma_derivative(lam, k); });
}

CMat matrix_phase(const Mat& D, int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("phase sign must be +1 or -1");
    const CMat L = cplx(0.0, -s * std::numbers::pi / 2.0) * D.cast<cplx>();
    return L.exp();
}

Mat psd_sqrt(const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
    const Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat psd_inv_sqrt(const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
    const Vec ev = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace oflm
