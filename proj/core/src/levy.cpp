#include "oflm/levy.hpp"

#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <numbers>

#include "oflm/errors.hpp"
#include "oflm/quadrature.hpp"

namespace oflm {

namespace {

constexpr double kLocTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// e^{iy} - 1 - iy
cplx levy_phase(double y) {
    if (std::abs(y) < 1e-2) {
        const double y2 = y * y;
        return {-0.5 * y2 + y2 * y2 / 24.0 - y2 * y2 * y2 / 720.0,
                -y2 * y / 6.0 + y2 * y2 * y / 120.0};
    }
    return expm1(cplx(0.0, y)) - cplx(0.0, y);
}

// Lower incomplete gamma for complex a (not a non-positive integer), x >= 0.
cplx lower_gamma(cplx a, double x);

// Upper incomplete gamma by Lentz continued fraction, x large.
cplx upper_gamma_cf(cplx a, double x) {
    const double tiny = 1e-300;
    cplx b = x + 1.0 - a;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 500; ++i) {
        const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

cplx lower_gamma(cplx a, double x) {
    if (x <= 0.0) return 0.0;
    if (x > 25.0) return gamma(a) - upper_gamma_cf(a, x);
    cplx sum = 0.0;
    double term = 1.0;  // (-x)^n / n!
    for (int n = 0; n < 200; ++n) {
        if (n > 0) term *= -x / n;
        const cplx add = term / (a + static_cast<double>(n));
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum) && n > 2) break;
    }
    return sum * std::exp(a * std::log(x));
}

// int_0^inf r^{g-2} q(r) dr
cplx radial_full(cplx g, const Tempering& q) {
    if (g.real() <= 1.0) throw RadialQuadratureDiverged("radial moment diverges at the origin");
    if (q.kind == Tempering::Kind::indicator) return std::pow(q.param, g - 1.0) / (g - 1.0);
    return gamma(g - 1.0) * std::pow(q.param, 1.0 - g);
}

// int_0^eps r^{g-2} q(r) dr
cplx radial_lower(cplx g, const Tempering& q, double eps) {
    if (g.real() <= 1.0) throw RadialQuadratureDiverged("radial moment diverges at the origin");
    if (eps <= 0.0) return 0.0;
    if (q.kind == Tempering::Kind::indicator) {
        return std::pow(std::min(eps, q.param), g - 1.0) / (g - 1.0);
    }
    return std::pow(q.param, 1.0 - g) * lower_gamma(g - 1.0, q.param * eps);
}

// int_eps^inf r^{g-2} q(r) dr, eps > 0
cplx radial_upper(cplx g, const Tempering& q, double eps) {
    if (q.kind == Tempering::Kind::indicator) {
        if (q.param <= eps) return 0.0;
        if (std::abs(g - 1.0) < 1e-14) return std::log(q.param / eps);
        return (std::pow(q.param, g - 1.0) - std::pow(eps, g - 1.0)) / (g - 1.0);
    }
    const cplx a = g - 1.0;
    const double x = q.param * eps;
    if (x > 25.0) return std::pow(q.param, -a) * upper_gamma_cf(a, x);
    return std::pow(q.param, -a) * (gamma(a) - lower_gamma(a, x));
}

// int_eps^inf q(r) r^{-2} dr
double radial_activity(const Tempering& q, double eps) {
    if (q.kind == Tempering::Kind::indicator) return q.param > eps ? 1.0 / eps - 1.0 / q.param : 0.0;
    return boost::math::expint(2, q.param * eps) / eps;
}

// r^B theta = sum_k r^{beta_k} c_k
std::vector<CVec> polar_coefficients(const TemperedOpStable& m, const Vec& theta) {
    const CMat& P = m.B_spectral.P();
    const CVec a = m.B_spectral.Pinv() * theta.cast<cplx>();
    std::vector<CVec> c;
    for (Eigen::Index k = 0; k < P.cols(); ++k) c.push_back(P.col(k) * a(k));
    return c;
}

template <class R>
Mat tos_moment(const TemperedOpStable& m, R&& radial) {
    const auto q = m.B.rows();
    const CVec& beta = m.B_spectral.eigenvalues();
    CMat acc = CMat::Zero(q, q);
    for (const auto& at : m.atoms) {
        const auto c = polar_coefficients(m, at.theta);
        for (Eigen::Index k = 0; k < beta.size(); ++k) {
            for (Eigen::Index l = 0; l < beta.size(); ++l) {
                acc += at.weight * radial(beta(k) + std::conj(beta(l)), at.tempering) * c[k] *
                       c[l].adjoint();
            }
        }
    }
    return acc.real();
}

void check_square(const Mat& T, Eigen::Index q) {
    if (T.rows() != q || T.cols() != q) throw ValidationError("map dimension does not match the measure");
}

double rel_close(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

bool loc_close(const Vec& a, const Vec& b) {
    return (a - b).cwiseAbs().maxCoeff() <= kLocTol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) return a(i) < b(i);
    }
    return false;
}

std::vector<Atom> canonical_atoms(std::vector<Atom> atoms, bool exact) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return lex_less(a.z, b.z); });
    std::vector<Atom> out;
    for (auto& a : atoms) {
        bool merged = false;
        for (auto& o : out) {
            if (exact ? o.z == a.z : loc_close(o.z, a.z)) {
                o.w += a.w;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(a));
    }
    return out;
}

// Greedy matching; unmatched mass counts fully. Returns the max deviation.
template <class T, class Close, class Weight>
double match_lists(const std::vector<T>& a, const std::vector<T>& b, Close close, Weight weight) {
    std::vector<bool> used(b.size(), false);
    double disc = 0.0;
    for (const auto& x : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && close(x, b[j])) {
                used[j] = true;
                disc = std::max(disc, std::abs(weight(x) - weight(b[j])));
                found = true;
                break;
            }
        }
        if (!found) disc = std::max(disc, weight(x));
    }
    for (std::size_t j = 0; j < b.size(); ++j)
        if (!used[j]) disc = std::max(disc, weight(b[j]));
    return disc;
}

std::vector<Vec> comparison_grid(Eigen::Index q) {
    std::vector<Vec> grid;
    for (double a : {0.5, 1.0, 2.0}) {
        for (Eigen::Index k = 0; k < q; ++k) {
            grid.push_back(a * Vec::Unit(q, k));
            for (Eigen::Index l = k + 1; l < q; ++l) {
                grid.push_back(a * (Vec::Unit(q, k) + Vec::Unit(q, l)) / std::sqrt(2.0));
                grid.push_back(a * (Vec::Unit(q, k) - Vec::Unit(q, l)) / std::sqrt(2.0));
            }
        }
    }
    return grid;
}

double symbol_discrepancy(const LevyMeasure& a, const LevyMeasure& b) {
    double d = 0.0;
    for (const Vec& u : comparison_grid(a.dim())) {
        d = std::max(d, std::abs(levy_symbol(a, u) - levy_symbol(b, u)));
    }
    return d;
}

std::vector<GaussianComponent> merged_components(std::vector<GaussianComponent> cs) {
    std::vector<GaussianComponent> out;
    for (auto& c : cs) {
        bool merged = false;
        for (auto& o : out) {
            if ((o.Sigma - c.Sigma).cwiseAbs().maxCoeff() <= kLocTol * std::max(1.0, o.Sigma.cwiseAbs().maxCoeff())) {
                o.rate += c.rate;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(c));
    }
    return out;
}

std::vector<SphereAtom> merged_sphere_atoms(const std::vector<SphereAtom>& in) {
    std::vector<SphereAtom> out;
    for (const auto& a : in) {
        bool merged = false;
        for (auto& o : out) {
            if (loc_close(o.theta, a.theta) && o.tempering.kind == a.tempering.kind &&
                rel_close(o.tempering.param, a.tempering.param) <= kLocTol) {
                o.weight += a.weight;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(a);
    }
    return out;
}

}  // namespace

// --- construction -----------------------------------------------------------

LevyMeasure LevyMeasure::discrete(std::vector<Atom> atoms, Eigen::Index dim) {
    if (atoms.empty()) {
        if (dim <= 0) throw ValidationError("empty discrete measure needs an explicit dimension");
        return LevyMeasure(Discrete{}, dim);
    }
    const auto q = atoms.front().z.size();
    if (dim > 0 && dim != q) throw ValidationError("atom dimension does not match");
    for (const auto& a : atoms) {
        if (a.z.size() != q) throw ValidationError("atoms of mixed dimension");
        if (!(a.w > 0.0) || !std::isfinite(a.w)) throw ValidationError("atom weights must be positive");
        if (!a.z.allFinite()) throw ValidationError("non-finite atom");
        if (a.z.cwiseAbs().maxCoeff() == 0.0) throw ValidationError("atom at the origin");
    }
    return LevyMeasure(Discrete{std::move(atoms)}, q);
}

LevyMeasure LevyMeasure::gaussian(const Mat& Sigma, double rate) {
    return gaussian_mixture({GaussianComponent{Sigma, rate}});
}

LevyMeasure LevyMeasure::gaussian_mixture(std::vector<GaussianComponent> comps) {
    if (comps.empty()) throw ValidationError("Gaussian jump law needs a component");
    const auto q = comps.front().Sigma.rows();
    for (auto& c : comps) {
        if (c.Sigma.rows() != q || c.Sigma.cols() != q) throw ValidationError("Sigma must be square, common size");
        if (!(c.rate > 0.0)) throw ValidationError("jump rate must be positive");
        if ((c.Sigma - c.Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.Sigma.norm())) {
            throw ValidationError("Sigma must be symmetric");
        }
        c.Sigma = (0.5 * (c.Sigma + c.Sigma.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(c.Sigma);
        if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, c.Sigma.norm())) {
            throw ValidationError("Sigma must be positive semidefinite");
        }
    }
    return LevyMeasure(GaussianJumps{std::move(comps)}, q);
}

LevyMeasure LevyMeasure::tempered(const Mat& B, std::vector<SphereAtom> atoms, double epsilon,
                                  bool gaussian_small_jumps) {
    const auto q = B.rows();
    if (B.cols() != q) throw ValidationError("B must be square");
    if (atoms.empty()) throw ValidationError("tempered operator-stable measure needs sphere atoms");
    TemperedOpStable m;
    m.B = B;
    m.epsilon = epsilon;
    m.gaussian_small_jumps = gaussian_small_jumps;
    m.B_spectral = Spectral::diagonalize(B.cast<cplx>());
    for (Eigen::Index k = 0; k < q; ++k) {
        const double re = m.B_spectral.eigenvalues()(k).real();
        if (re <= 0.5) {
            throw RadialQuadratureDiverged("eigenvalue of B with real part " + std::to_string(re) +
                                           " <= 1/2: second moment diverges");
        }
        if (re >= 1.0) {
            throw ValidationError("eigenvalue of B with real part " + std::to_string(re) + " >= 1");
        }
    }
    for (auto& a : atoms) {
        if (a.theta.size() != q) throw ValidationError("sphere atom dimension does not match B");
        if (std::abs(a.theta.norm() - 1.0) > 1e-9) throw ValidationError("sphere atoms must be unit vectors");
        if (!(a.weight > 0.0)) throw ValidationError("sphere atom weights must be positive");
        if (!(a.tempering.param > 0.0)) throw ValidationError("tempering parameter must be positive");
    }
    m.atoms = std::move(atoms);
    LevyMeasure out(std::move(m), q);
    const Mat M2 = second_moment(out);
    if (!M2.allFinite()) throw RadialQuadratureDiverged("second moment is not finite");
    return out;
}

std::string LevyMeasure::kind() const {
    return std::visit(overloaded{[](const Discrete&) { return std::string("discrete"); },
                                 [](const GaussianJumps&) { return std::string("gaussian"); },
                                 [](const TemperedOpStable&) { return std::string("tempered_opstable"); }},
                      v_);
}

ComplexLevyView ComplexLevyView::make(LevyMeasure m) {
    if (m.dim() % 2 != 0) throw ValidationError("complex view needs an even dimension");
    return ComplexLevyView{std::move(m)};
}

// --- moments ----------------------------------------------------------------

Mat second_moment(const LevyMeasure& mu) {
    const auto q = mu.dim();
    return std::visit(
        overloaded{[&](const Discrete& d) {
                       Mat m = Mat::Zero(q, q);
                       for (const auto& a : d.atoms) m += a.w * a.z * a.z.transpose();
                       return m;
                   },
                   [&](const GaussianJumps& g) {
                       Mat m = Mat::Zero(q, q);
                       for (const auto& c : g.components) m += c.rate * c.Sigma;
                       return m;
                   },
                   [&](const TemperedOpStable& t) {
                       return tos_moment(t, [](cplx gm, const Tempering& tq) { return radial_full(gm, tq); });
                   }},
        mu.variant());
}

ComplexMoments complex_moments(const ComplexLevyView& mu) {
    const Mat M = second_moment(mu.base);
    const auto p = mu.p();
    return {M.topLeftCorner(p, p), M.bottomRightCorner(p, p), M.topRightCorner(p, p)};
}

Mat small_jump_moment(const LevyMeasure& mu) {
    const auto q = mu.dim();
    if (const auto* t = std::get_if<TemperedOpStable>(&mu.variant())) {
        const double eps = t->epsilon;
        return tos_moment(*t, [eps](cplx gm, const Tempering& tq) { return radial_lower(gm, tq, eps); });
    }
    return Mat::Zero(q, q);
}

Vec mean_jump(const LevyMeasure& mu, bool truncated) {
    const auto q = mu.dim();
    return std::visit(
        overloaded{[&](const Discrete& d) {
                       Vec m = Vec::Zero(q);
                       for (const auto& a : d.atoms) m += a.w * a.z;
                       return m;
                   },
                   [&](const GaussianJumps&) -> Vec { return Vec::Zero(q); },
                   [&](const TemperedOpStable& t) -> Vec {
                       if (!truncated || t.epsilon <= 0.0) {
                           throw FirstMomentDiverged(
                               "first moment of the small jumps diverges; use the truncated mean");
                       }
                       CVec m = CVec::Zero(q);
                       const CVec& beta = t.B_spectral.eigenvalues();
                       for (const auto& at : t.atoms) {
                           const auto c = polar_coefficients(t, at.theta);
                           for (Eigen::Index k = 0; k < beta.size(); ++k) {
                               m += at.weight * radial_upper(beta(k), at.tempering, t.epsilon) * c[k];
                           }
                       }
                       return m.real();
                   }},
        mu.variant());
}

double total_activity(const LevyMeasure& mu) {
    return std::visit(overloaded{[](const Discrete& d) {
                                     double s = 0.0;
                                     for (const auto& a : d.atoms) s += a.w;
                                     return s;
                                 },
                                 [](const GaussianJumps& g) {
                                     double s = 0.0;
                                     for (const auto& c : g.components) s += c.rate;
                                     return s;
                                 },
                                 [](const TemperedOpStable& t) {
                                     if (t.epsilon <= 0.0) {
                                         throw TruncationRequired("infinite activity without a small-jump cutoff");
                                     }
                                     double s = 0.0;
                                     for (const auto& a : t.atoms) s += a.weight * radial_activity(a.tempering, t.epsilon);
                                     return s;
                                 }},
                      mu.variant());
}

// --- transformations ---------------------------------------------------------

Vec polar_point(const TemperedOpStable& m, double r, const Vec& theta) {
    const CVec& beta = m.B_spectral.eigenvalues();
    CVec pw(beta.size());
    const double lr = std::log(r);
    for (Eigen::Index k = 0; k < beta.size(); ++k) pw(k) = std::exp(beta(k) * lr);
    return (m.B_spectral.apply_diagonal(pw) * theta.cast<cplx>()).real();
}

LevyMeasure pushforward(const LevyMeasure& mu, const Mat& T) {
    check_square(T, mu.dim());
    return std::visit(
        overloaded{
            [&](const Discrete& d) {
                std::vector<Atom> out;
                for (const auto& a : d.atoms) {
                    Vec z = T * a.z;
                    if (z.cwiseAbs().maxCoeff() == 0.0) continue;  // mass sent to the origin is dropped
                    out.push_back({std::move(z), a.w});
                }
                return LevyMeasure::discrete(std::move(out), mu.dim());
            },
            [&](const GaussianJumps& g) {
                std::vector<GaussianComponent> out;
                for (const auto& c : g.components) out.push_back({T * c.Sigma * T.transpose(), c.rate});
                return LevyMeasure::gaussian_mixture(std::move(out));
            },
            [&](const TemperedOpStable& t) {
                const double scale = std::max(1.0, T.norm() * t.B.norm());
                if ((T * t.B - t.B * T).cwiseAbs().maxCoeff() > 1e-12 * scale) {
                    throw UnsupportedPushforward("map does not commute with B");
                }
                std::vector<SphereAtom> out;
                for (const auto& a : t.atoms) {
                    const Vec v = T * a.theta;
                    if (v.norm() == 0.0) throw UnsupportedPushforward("map is singular on the support");
                    // s with |s^{-B} v| = 1, by bisection on log s
                    double lo = -60.0, hi = 60.0;
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (polar_point(t, std::exp(-mid), v).norm() > 1.0) lo = mid; else hi = mid;
                    }
                    const double s = std::exp(0.5 * (lo + hi));
                    Vec theta = polar_point(t, 1.0 / s, v);
                    theta /= theta.norm();
                    Tempering q = a.tempering;
                    q.param = q.kind == Tempering::Kind::indicator ? q.param * s : q.param / s;
                    out.push_back({std::move(theta), a.weight * s, q});
                }
                return LevyMeasure::tempered(t.B, std::move(out), t.epsilon, t.gaussian_small_jumps);
            }},
        mu.variant());
}

Mat conjugation_map(Eigen::Index p) {
    Mat C = Mat::Identity(2 * p, 2 * p);
    C.bottomRightCorner(p, p) *= -1.0;
    return C;
}

Mat realify(const CMat& C) {
    const auto p = C.rows();
    Mat R(2 * p, 2 * p);
    R << C.real(), -C.imag(), C.imag(), C.real();
    return R;
}

Mat rotation_map(Eigen::Index p, double theta) {
    return realify(std::polar(1.0, theta) * CMat::Identity(p, p));
}

ComplexLevyView symmetrize_conjugate(const ComplexLevyView& mu) {
    const Mat C = conjugation_map(mu.p());
    const LevyMeasure conj = pushforward(mu.base, C);
    return std::visit(
        overloaded{
            [&](const Discrete& d) {
                std::vector<Atom> atoms;
                for (const auto& a : d.atoms) atoms.push_back({a.z, 0.5 * a.w});
                for (const auto& a : std::get<Discrete>(conj.variant()).atoms) atoms.push_back({a.z, 0.5 * a.w});
                return ComplexLevyView::make(LevyMeasure::discrete(canonical_atoms(std::move(atoms), true), mu.base.dim()));
            },
            [&](const GaussianJumps& g) {
                std::vector<GaussianComponent> cs;
                for (const auto& c : g.components) cs.push_back({c.Sigma, 0.5 * c.rate});
                for (const auto& c : std::get<GaussianJumps>(conj.variant()).components) cs.push_back({c.Sigma, 0.5 * c.rate});
                return ComplexLevyView::make(LevyMeasure::gaussian_mixture(merged_components(std::move(cs))));
            },
            [&](const TemperedOpStable& t) {
                std::vector<SphereAtom> as;
                for (auto a : t.atoms) { a.weight *= 0.5; as.push_back(a); }
                for (auto a : std::get<TemperedOpStable>(conj.variant()).atoms) { a.weight *= 0.5; as.push_back(a); }
                return ComplexLevyView::make(
                    LevyMeasure::tempered(t.B, merged_sphere_atoms(as), t.epsilon, t.gaussian_small_jumps));
            }},
        mu.base.variant());
}

LevyMeasure rescale_tempering(const LevyMeasure& mu, double s) {
    if (const auto* t = std::get_if<TemperedOpStable>(&mu.variant())) {
        auto atoms = t->atoms;
        for (auto& a : atoms) {
            a.tempering.param = a.tempering.kind == Tempering::Kind::indicator ? a.tempering.param / s
                                                                              : a.tempering.param * s;
        }
        return LevyMeasure::tempered(t->B, std::move(atoms), t->epsilon, t->gaussian_small_jumps);
    }
    return mu;
}

LevyMeasure normalized_time(const LevyMeasure& mu) {
    const Mat M = second_moment(mu);
    if (Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, M.norm())) {
        throw ValidationError("second moment is singular; cannot normalise");
    }
    return pushforward(mu, psd_inv_sqrt(M));
}

ComplexLevyView normalized_fourier(const ComplexLevyView& mu) {
    const auto m = complex_moments(mu);
    const auto p = mu.p();
    for (const Mat* S : {&m.S11, &m.S22}) {
        if (Eigen::SelfAdjointEigenSolver<Mat>(*S).eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, S->norm())) {
            throw ValidationError("real or imaginary second moment is singular; cannot normalise");
        }
    }
    Mat T = Mat::Zero(2 * p, 2 * p);
    T.topLeftCorner(p, p) = psd_inv_sqrt(4.0 * m.S11);
    T.bottomRightCorner(p, p) = psd_inv_sqrt(4.0 * m.S22);
    return ComplexLevyView::make(pushforward(mu.base, T));
}

// --- comparison -------------------------------------------------------------

MeasureComparison measure_equal(const LevyMeasure& a, const LevyMeasure& b, double tol) {
    if (a.dim() != b.dim()) throw IncomparableVariants("measures live in different dimensions");
    double disc = 0.0;
    const auto* da = std::get_if<Discrete>(&a.variant());
    const auto* db = std::get_if<Discrete>(&b.variant());
    const auto* ga = std::get_if<GaussianJumps>(&a.variant());
    const auto* gb = std::get_if<GaussianJumps>(&b.variant());
    const auto* ta = std::get_if<TemperedOpStable>(&a.variant());
    const auto* tb = std::get_if<TemperedOpStable>(&b.variant());
    if (da && db) {
        disc = match_lists(canonical_atoms(da->atoms, false), canonical_atoms(db->atoms, false),
                           [](const Atom& x, const Atom& y) { return loc_close(x.z, y.z); },
                           [](const Atom& x) { return x.w; });
    } else if (ga && gb) {
        if (ga->components.size() == 1 && gb->components.size() == 1) {
            disc = (ga->components[0].Sigma - gb->components[0].Sigma).cwiseAbs().maxCoeff() +
                   std::abs(ga->components[0].rate - gb->components[0].rate);
        } else {
            // zero-mean Gaussian mixtures are identified by their components
            const auto ca = merged_components(ga->components), cb = merged_components(gb->components);
            auto close = [](const GaussianComponent& x, const GaussianComponent& y) {
                return (x.Sigma - y.Sigma).cwiseAbs().maxCoeff() <= kLocTol * std::max(1.0, x.Sigma.cwiseAbs().maxCoeff());
            };
            disc = match_lists(ca, cb, close, [](const GaussianComponent& x) { return x.rate; });
        }
    } else if (ta && tb && (ta->B - tb->B).cwiseAbs().maxCoeff() <= 1e-12) {
        auto close = [](const SphereAtom& x, const SphereAtom& y) {
            return loc_close(x.theta, y.theta) && x.tempering.kind == y.tempering.kind &&
                   rel_close(x.tempering.param, y.tempering.param) <= kLocTol;
        };
        disc = match_lists(merged_sphere_atoms(ta->atoms), merged_sphere_atoms(tb->atoms), close,
                           [](const SphereAtom& x) { return x.weight; });
    } else {
        disc = symbol_discrepancy(a, b);
    }
    return {disc <= tol, disc};
}

cplx levy_symbol(const LevyMeasure& mu, const Vec& u) {
    if (u.size() != mu.dim()) throw ValidationError("symbol argument has the wrong dimension");
    return std::visit(
        overloaded{[&](const Discrete& d) {
                       cplx s = 0.0;
                       for (const auto& a : d.atoms) s += a.w * levy_phase(u.dot(a.z));
                       return s;
                   },
                   [&](const GaussianJumps& g) {
                       cplx s = 0.0;
                       for (const auto& c : g.components) s += c.rate * std::expm1(-0.5 * u.dot(c.Sigma * u));
                       return s;
                   },
                   [&](const TemperedOpStable& t) {
                       cplx s = 0.0;
                       const CVec& beta = t.B_spectral.eigenvalues();
                       QuadOptions opt;
                       opt.abs_tol = 1e-12;
                       opt.global_tol = 1e-9;
                       for (const auto& at : t.atoms) {
                           const auto c = polar_coefficients(t, at.theta);
                           CVec uc(beta.size());
                           for (Eigen::Index k = 0; k < beta.size(); ++k) uc(k) = u.cast<cplx>().dot(c[k]);
                           auto f = [&](QPoint qp) {
                               const double r = qp.value();
                               QVec v(1);
                               if (r <= 0.0) { v(0) = 0.0; return v; }
                               cplx y = 0.0;
                               const double lr = std::log(r);
                               for (Eigen::Index k = 0; k < beta.size(); ++k) y += std::exp(beta(k) * lr) * uc(k);
                               v(0) = levy_phase(y.real()) * at.tempering(r) / (r * r);
                               return v;
                           };
                           const bool ind = at.tempering.kind == Tempering::Kind::indicator;
                           const double hi = ind ? at.tempering.param : std::numeric_limits<double>::infinity();
                           const double scale = ind ? at.tempering.param : 1.0 / at.tempering.param;
                           const QuadResult res = integrate_line(f, 1, 0.0, hi, {}, scale, opt);
                           s += at.weight * res.value(0);
                       }
                       return s;
                   }},
        mu.variant());
}

double rotation_invariance_report(const ComplexLevyView& mu, const std::vector<double>& thetas) {
    double worst = 0.0;
    for (double th : thetas) {
        const LevyMeasure rot = pushforward(mu.base, rotation_map(mu.p(), th));
        worst = std::max(worst, measure_equal(mu.base, rot, 0.0).discrepancy);
    }
    return worst;
}

// --- sampling ---------------------------------------------------------------

JumpSampler::JumpSampler(const LevyMeasure& mu) : mu_(mu) {
    std::visit(overloaded{[&](const Discrete& d) {
                              for (const auto& a : d.atoms) {
                                  activity_ += a.w;
                                  cumulative_.push_back(activity_);
                              }
                          },
                          [&](const GaussianJumps& g) {
                              for (const auto& c : g.components) {
                                  activity_ += c.rate;
                                  cumulative_.push_back(activity_);
                                  factors_.push_back(psd_sqrt(c.Sigma));
                              }
                          },
                          [&](const TemperedOpStable& t) {
                              if (t.epsilon <= 0.0) throw TruncationRequired("sampling needs epsilon > 0");
                              beta_ = t.B_spectral.eigenvalues();
                              for (const auto& a : t.atoms) {
                                  activity_ += a.weight * radial_activity(a.tempering, t.epsilon);
                                  cumulative_.push_back(activity_);
                                  polar_.push_back(polar_coefficients(t, a.theta));
                              }
                          }},
               mu.variant());
}

Vec JumpSampler::sample(Rng& rng) const {
    Vec z(mu_.dim());
    sample_to(rng, z);
    return z;
}

void JumpSampler::sample_to(Rng& rng, Eigen::Ref<Vec> z) const {
    if (cumulative_.empty() || !(activity_ > 0.0)) throw TruncationRequired("measure has no mass to sample");
    const std::size_t k = rng.categorical(cumulative_.data(), cumulative_.size());
    std::visit(
        overloaded{[&](const Discrete& d) { z = d.atoms[k].z; },
                   [&](const GaussianJumps& g) {
                       Vec n(g.components[k].Sigma.rows());
                       for (Eigen::Index i = 0; i < n.size(); ++i) n(i) = rng.normal();
                       z.noalias() = factors_[k] * n;
                   },
                   [&](const TemperedOpStable& t) {
                       const SphereAtom& a = t.atoms[k];
                       const double eps = t.epsilon;
                       const double c = a.tempering.param;
                       double r;
                       if (a.tempering.kind == Tempering::Kind::indicator) {
                           // density r^{-2} on [eps, r0]: 1/r is uniform
                           const double u = rng.uniform();
                           r = 1.0 / (1.0 / eps - u * (1.0 / eps - 1.0 / c));
                       } else if (c * eps <= 1.0) {
                           // Pareto proposal, accept with e^{-c (r - eps)}
                           do {
                               r = eps / rng.uniform();
                           } while (rng.uniform() > std::exp(-c * (r - eps)));
                       } else {
                           // shifted exponential proposal, accept with (eps / r)^2
                           do {
                               r = eps - std::log(rng.uniform()) / c;
                           } while (rng.uniform() > (eps / r) * (eps / r));
                       }
                       const double lr = std::log(r);
                       const auto& coef = polar_[k];
                       z.setZero();
                       for (Eigen::Index i = 0; i < beta_.size(); ++i) {
                           if (beta_(i).imag() == 0.0) {
                               z += std::exp(beta_(i).real() * lr) * coef[static_cast<std::size_t>(i)].real();
                           } else {
                               z += (std::exp(beta_(i) * lr) * coef[static_cast<std::size_t>(i)]).real();
                           }
                       }
                   }},
        mu_.variant());
}

Vec sample_jump(const LevyMeasure& mu, Rng& rng) { return JumpSampler(mu).sample(rng); }

}  // namespace oflm
