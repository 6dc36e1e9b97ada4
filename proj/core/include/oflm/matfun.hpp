#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "oflm/special.hpp"

namespace oflm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kDefaultConditionCap = 1e8;
inline constexpr double kHalfIdentityTol = 1e-12;

// One block of a Jordan form. Blocks are lower bidiagonal: ones sit on the
// subdiagonal, so f(J) carries f^(k)(lambda)/k! on the k-th subdiagonal.
struct JordanBlock {
    cplx eigenvalue;
    int size = 1;
};

// M = P * J * P^{-1}.
struct JordanForm {
    CMat P;
    std::vector<JordanBlock> blocks;
};

// Factorised matrix supporting primary matrix functions.
class Spectral {
public:
    Spectral() = default;

    static Spectral diagonalize(const CMat& M, double cond_cap = kDefaultConditionCap);
    static Spectral from_jordan(const JordanForm& jf);

    // f(lambda, k) must return the k-th derivative of the scalar function at lambda.
    template <class F>
    CMat apply(F&& f) const {
        const Eigen::Index n = P_.rows();
        CMat J = CMat::Zero(n, n);
        Eigen::Index off = 0;
        for (const auto& b : blocks_) {
            double fact = 1.0;
            for (int k = 0; k < b.size; ++k) {
                if (k > 0) fact *= k;
                const cplx v = f(b.eigenvalue, k) / fact;
                for (int i = k; i < b.size; ++i) J(off + i, off + i - k) = v;
            }
            off += b.size;
        }
        return P_ * J * Pinv_;
    }

    // P diag(values) P^{-1}; requires a diagonalizable factorisation.
    CMat apply_diagonal(const CVec& values) const;

    Spectral shifted(cplx s) const;

    const CVec& eigenvalues() const { return eig_; }
    const std::vector<JordanBlock>& blocks() const { return blocks_; }
    const CMat& P() const { return P_; }
    const CMat& Pinv() const { return Pinv_; }
    bool diagonalizable() const { return diagonalizable_; }
    double condition_number() const { return cond_; }
    Eigen::Index dim() const { return P_.rows(); }

private:
    CMat P_, Pinv_;
    CVec eig_;
    std::vector<JordanBlock> blocks_;
    bool diagonalizable_ = true;
    double cond_ = 1.0;
};

enum class Regime { general, half_identity, crosses_half_line, upper };
const char* to_string(Regime r);

struct SpectralReport {
    std::vector<cplx> eigenvalues;
    Regime regime = Regime::general;
    double condition_number = 1.0;
};

struct HurstSpec {
    Mat H;
    Mat D;
    std::vector<double> eig_real_parts;
    bool jordan = false;
    SpectralReport report;
    Spectral spectral_D;

    Eigen::Index dim() const { return H.rows(); }
    // Regime general, including the "upper" sub-case.
    bool time_kernel_general() const {
        return report.regime == Regime::general || report.regime == Regime::upper;
    }
};

SpectralReport validate_hurst(const Mat& H, double cond_cap = kDefaultConditionCap);
SpectralReport validate_hurst(const Mat& H, const JordanForm& jf);

HurstSpec make_hurst(const Mat& H, double cond_cap = kDefaultConditionCap);
HurstSpec make_hurst(const Mat& H, const JordanForm& jf);

// exp(log(c) M)
CMat matrix_power(const CMat& M, double c);
Mat matrix_power(const Mat& M, double c);
CMat matrix_power(const Spectral& S, double c);

enum class Side { plus, minus };
Mat truncated_matrix_power(double t, const Mat& D, Side side);

CMat matrix_gamma(const CMat& M, double cond_cap = kDefaultConditionCap);
CMat matrix_gamma(const JordanForm& jf);

// exp(s * (-i pi / 2) * D), s = +1 or -1
CMat matrix_phase(const Mat& D, int s);

// Symmetric PSD square root and its inverse.
Mat psd_sqrt(const Mat& S);
Mat psd_inv_sqrt(const Mat& S);

}  // namespace oflm
