#include "oflm/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oflm/errors.hpp"

namespace oflm {

namespace {

std::vector<double> sorted_real_eigs(const Mat& M) {
    const Eigen::EigenSolver<Mat> es(M, false);
    std::vector<double> re;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) re.push_back(es.eigenvalues()(k).real());
    std::sort(re.begin(), re.end());
    return re;
}

template <class A, class B>
bool commute(const A& a, const B& b) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());
    return (a * b - b * a).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

void check_square_pair(const Mat& H, const Mat& B) {
    if (H.rows() != H.cols() || B.rows() != B.cols() || H.rows() != B.rows()) {
        throw std::invalid_argument("H and B must be p x p");
    }
}

void check_b_range(const std::vector<double>& rb) {
    for (double r : rb) {
        if (!(r > 0.5 && r < 1.0)) {
            throw HypothesisViolated("Re eig(B) = " + std::to_string(r) + " is outside (1/2, 1)");
        }
    }
}

const TemperedOpStable& tos_of(const LevyMeasure& mu, const char* what) {
    const auto* t = std::get_if<TemperedOpStable>(&mu.variant());
    if (!t) throw ValidationError(std::string(what) + " needs a tempered operator-stable measure, got " + mu.kind());
    return *t;
}

// B from B (+) B on R^{2p}.
Mat block_exponent(const TemperedOpStable& t, Eigen::Index p) {
    const Mat& Bt = t.B;
    const Mat B = Bt.topLeftCorner(p, p);
    const double off = std::max(Bt.topRightCorner(p, p).cwiseAbs().maxCoeff(),
                                Bt.bottomLeftCorner(p, p).cwiseAbs().maxCoeff());
    if (off > 0.0 || (Bt.bottomRightCorner(p, p) - B).cwiseAbs().maxCoeff() > 0.0) {
        throw HypothesisViolated("the exponent on R^{2p} must be B (+) B");
    }
    return B;
}

void apply_matrix(SamplePath& sp, const Mat& M, const std::vector<double>& grid) {
    for (auto& v : sp.values) v = M * v;
    sp.grid = grid;
}

std::vector<double> scaled(const std::vector<double>& g, double c) {
    std::vector<double> out(g);
    for (double& t : out) t *= c;
    return out;
}

void check_scale(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("scale must be positive and finite");
}

// r^B theta = r^b v for a sphere atom.
struct Projection {
    Vec v;
    double b = 0.0;
    const SphereAtom* atom = nullptr;
};

std::vector<Projection> projections(const TemperedOpStable& t) {
    std::vector<Projection> out;
    const Spectral& S = t.B_spectral;
    if (!S.diagonalizable()) throw UnsupportedStructure("limit chf needs a diagonalizable B");
    const CVec& beta = S.eigenvalues();
    for (const auto& a : t.atoms) {
        const CVec coef = S.Pinv() * a.theta.cast<cplx>();
        CVec v = CVec::Zero(a.theta.size());
        bool have = false;
        cplx b0 = 0.0;
        for (Eigen::Index k = 0; k < coef.size(); ++k) {
            if (std::abs(coef(k)) <= 1e-12) continue;
            if (!have) {
                b0 = beta(k);
                have = true;
            } else if (std::abs(beta(k) - b0) > 1e-12) {
                throw UnsupportedStructure("sphere atom mixes eigen-directions of B with different eigenvalues");
            }
            v += S.P().col(k) * coef(k);
        }
        if (!have) continue;
        if (std::abs(b0.imag()) > 1e-12) throw UnsupportedStructure("limit chf needs real eigenvalues of B");
        out.push_back(Projection{v.real(), b0.real(), &a});
    }
    return out;
}

// sum_n>=2 (i)^n a^{n - alpha} / (n! (n - alpha)) = int_0^a (e^{iw} - 1 - iw) w^{-alpha-1} dw
cplx lower_series(double a, double alpha) {
    cplx sum = 0.0;
    cplx in = cplx(0.0, 1.0);  // i^n
    double term = 1.0;          // a^n / n!
    for (int n = 1; n < 200; ++n) {
        term *= a / n;
        if (n == 1) {
            in = cplx(0.0, 1.0);
            continue;
        }
        in *= cplx(0.0, 1.0);
        const cplx add = in * term / (n - alpha);
        sum += add;
        if (term < 1e-18 * std::max(1e-300, std::abs(sum)) && n > 4) break;
    }
    return sum * std::pow(a, -alpha);
}

// int_a^inf (e^{iw} - 1 - iw) w^{-alpha-1} dw, a > 0, via w = a + i s for the exponential.
cplx upper_contour(double a, double alpha, const QuadOptions& quad) {
    auto f = [&](QPoint s) -> QVec {
        QVec v(1);
        const double x = s.value();
        v(0) = std::exp(-x) * std::pow(cplx(a, x), -alpha - 1.0);
        return v;
    };
    const cplx I = cplx(0.0, 1.0);
    const cplx osc = I * std::exp(I * a) * integrate_line(f, 1, 0.0, kInf, {}, std::min(1.0, a), quad).value(0);
    return osc - std::pow(a, -alpha) / alpha - I * std::pow(a, 1.0 - alpha) / (alpha - 1.0);
}

}  // namespace

Mat hurst_local(const Mat& H, const Mat& B) {
    check_square_pair(H, B);
    return H + B - 0.5 * Mat::Identity(H.rows(), H.cols());
}

Mat hurst_asymptotic(const Mat& H, const Mat& B) {
    check_square_pair(H, B);
    return H + 0.5 * Mat::Identity(H.rows(), H.cols()) - B;
}

void check_local_hypotheses(const Mat& H, const Mat& B) {
    check_square_pair(H, B);
    const auto rb = sorted_real_eigs(B);
    check_b_range(rb);
    if (!commute(H, B)) throw HypothesisViolated("H and B do not commute");
    const Mat D = H - 0.5 * Mat::Identity(H.rows(), H.cols());
    const double lhs = sorted_real_eigs(D).back() + rb.back();
    if (!(lhs < 1.0)) {
        throw HypothesisViolated("Re l_p(H - I/2) + Re l_p(B) = " + std::to_string(lhs) + " is not below 1");
    }
}

void check_asymptotic_hypotheses(const Mat& H, const CMat& A, const Mat& B) {
    check_square_pair(H, B);
    const auto rb = sorted_real_eigs(B);
    check_b_range(rb);
    if (!commute(H, B)) throw HypothesisViolated("H and B do not commute");
    if (!commute(A, CMat(B.cast<cplx>()))) throw HypothesisViolated("A and B do not commute");
    const auto rh = sorted_real_eigs(H);
    const double lo = rh.front() + 0.5 - rb.back();
    const double hi = rh.back() + 0.5 - rb.front();
    if (!(lo > 0.0)) {
        throw HypothesisViolated("Re l_1(H) + 1/2 - Re l_p(B) = " + std::to_string(lo) + " is not positive");
    }
    if (!(hi < 1.0)) {
        throw HypothesisViolated("Re l_p(H) + 1/2 - Re l_1(B) = " + std::to_string(hi) + " is not below 1");
    }
}

const char* to_string(LimitKind k) {
    switch (k) {
        case LimitKind::ma_large: return "ma_large";
        case LimitKind::rh_small: return "rh_small";
        case LimitKind::ma_local: return "ma_local";
        case LimitKind::rh_large: return "rh_large";
    }
    return "?";
}

Ensemble rescaled_ensemble(const RescaleRequest& req, const MaModel& model) {
    check_scale(req.scale);
    const Mat& H = model.params.hurst.H;
    const double c = req.scale;
    std::vector<double> sim_grid = req.grid;
    Mat post = Mat::Identity(H.rows(), H.cols());
    LevyMeasure mu = model.mu;

    switch (req.kind) {
        case LimitKind::ma_large:
            sim_grid = scaled(req.grid, c);
            post = matrix_power(H, 1.0 / c);
            break;
        case LimitKind::ma_local: {
            const Mat B = tos_of(model.mu, "ma_local").B;
            check_local_hypotheses(H, B);
            if (model.params.variant != TimeKernelParams::Variant::general ||
                !commute(model.params.M_plus, B) || !commute(model.params.M_minus, B)) {
                throw NonCommutingUnsupported("ma_local needs B to commute with M_plus and M_minus");
            }
            if (req.direct) {
                sim_grid = scaled(req.grid, c);
                post = matrix_power(hurst_local(H, B), 1.0 / c);
            } else {
                // eps^{-H1} X(eps .) has the law of the unit-scale process with q(r) -> q(eps r)
                mu = rescale_tempering(model.mu, c);
            }
            break;
        }
        default:
            throw std::invalid_argument(std::string(to_string(req.kind)) + " applies to the harmonizable model");
    }

    const MaSimulator sim(model.params, mu, sim_grid, req.sim);
    const auto& grid = req.grid;
    return run_ensemble(req.replications, req.seed, req.threads, [&](Rng& rng) {
        SamplePath sp = sim.path(rng);
        apply_matrix(sp, post, grid);
        return sp;
    });
}

Ensemble rescaled_ensemble(const RescaleRequest& req, const RhModel& model) {
    check_scale(req.scale);
    const Mat& H = model.params.hurst.H;
    const auto p = H.rows();
    const double c = req.scale;
    std::vector<double> sim_grid = req.grid;
    Mat post = Mat::Identity(p, p);
    ComplexLevyView mu = model.mu;

    switch (req.kind) {
        case LimitKind::rh_small:
            sim_grid = scaled(req.grid, c);
            post = matrix_power(H, 1.0 / c);
            break;
        case LimitKind::rh_large: {
            const Mat B = block_exponent(tos_of(model.mu.base, "rh_large"), p);
            if (!commute(H, B) || !commute(model.params.A, CMat(B.cast<cplx>()))) {
                throw NonCommutingUnsupported("rh_large needs B to commute with H and A");
            }
            check_asymptotic_hypotheses(H, model.params.A, B);
            if (req.direct) {
                sim_grid = scaled(req.grid, c);
                post = matrix_power(hurst_asymptotic(H, B), 1.0 / c);
            } else {
                // c^{-H2} X(c .) has the law of the unit-scale process with q(r) -> q(r / c)
                mu = ComplexLevyView::make(rescale_tempering(model.mu.base, 1.0 / c));
            }
            break;
        }
        default:
            throw std::invalid_argument(std::string(to_string(req.kind)) + " applies to the moving-average model");
    }

    const RhSimulator sim(model.params, mu, sim_grid, req.sim);
    const auto& grid = req.grid;
    return run_ensemble(req.replications, req.seed, req.threads, [&](Rng& rng) {
        SamplePath sp = sim.path(rng);
        apply_matrix(sp, post, grid);
        return sp;
    });
}

GaussianLimitDistance gaussian_limit_distance(const Ensemble& ens, const Mat& target,
                                              const std::vector<double>& times,
                                              const std::vector<std::vector<Vec>>& u) {
    GaussianLimitDistance out;
    const auto p = ens.dim();
    const auto n = static_cast<Eigen::Index>(times.size());
    if (target.rows() != p * n || target.cols() != p * n) {
        throw std::invalid_argument("target must be p*n x p*n for the given times");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const CovEstimate est = sample_cov(ens, times[i], times[j]);
            const Mat tgt = target.block(i * p, j * p, p, p);
            for (Eigen::Index a = 0; a < p; ++a) {
                for (Eigen::Index b = 0; b < p; ++b) {
                    const double diff = std::abs(est.value(a, b) - tgt(a, b));
                    const double se = est.se(a, b);
                    double z = 0.0;
                    if (se > 0.0) {
                        z = diff / se;
                    } else if (diff > 1e-12 * std::max(1.0, std::abs(tgt(a, b)))) {
                        z = std::numeric_limits<double>::infinity();
                    }
                    out.cov_z = std::max(out.cov_z, z);
                }
            }
        }
    }

    const auto chf = empirical_chf(ens, times, u);
    for (std::size_t k = 0; k < u.size(); ++k) {
        Vec w(p * n);
        for (Eigen::Index j = 0; j < n; ++j) w.segment(j * p, p) = u[k][static_cast<std::size_t>(j)];
        const double g = std::exp(-0.5 * w.dot(target * w));
        out.chf_distance = std::max(out.chf_distance, std::abs(chf[k].value - g));
        out.chf_ci = chf[k].ci_radius;
    }

    for (double t : times) {
        if (t == 0.0) continue;
        for (Eigen::Index a = 0; a < p; ++a) out.kurtosis.push_back(excess_kurtosis(ens, t, a));
    }
    return out;
}

double fourth_moment(const LevyMeasure& mu) {
    if (mu.dim() != 1) throw std::invalid_argument("fourth moment is defined here for scalar measures");
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            double s = 0.0;
            if constexpr (std::is_same_v<T, Discrete>) {
                for (const auto& a : m.atoms) s += a.w * std::pow(a.z(0), 4);
            } else if constexpr (std::is_same_v<T, GaussianJumps>) {
                for (const auto& c : m.components) s += 3.0 * c.rate * c.Sigma(0, 0) * c.Sigma(0, 0);
            } else {
                const double b = m.B(0, 0);
                const double g = 4.0 * b;  // int r^{4b-2} q(r) dr
                if (g <= 1.0) throw FourthMomentDiverged("int z^4 mu(dz) diverges at the origin");
                for (const auto& a : m.atoms) {
                    const double th4 = std::pow(a.theta(0), 4);
                    const double r = a.tempering.kind == Tempering::Kind::indicator
                                         ? std::pow(a.tempering.param, g - 1.0) / (g - 1.0)
                                         : std::tgamma(g - 1.0) * std::pow(a.tempering.param, 1.0 - g);
                    s += a.weight * th4 * r;
                }
            }
            return s;
        },
        mu.variant());
}

double predicted_excess_kurtosis(const MaModel& model, double t, double c, const QuadOptions& quad) {
    if (model.params.dim() != 1) throw std::invalid_argument("kurtosis prediction needs p = 1");
    check_scale(c);
    const double g4 = time_kernel_fourth_power_integral(t, model.params, quad);
    const double var = time_isometry(t, t, model.params, second_moment(model.mu), quad)(0, 0);
    if (!(var > 0.0)) throw DegenerateVariance("Var X(t) is zero");
    return g4 * fourth_moment(model.mu) / (var * var) / c;
}

std::vector<KurtosisRow> kurtosis_scaling(const MaModel& model, double t, const std::vector<double>& scales,
                                          std::size_t replications, std::uint64_t seed, unsigned threads,
                                          const SimOptions& sim) {
    std::vector<KurtosisRow> rows;
    const double base = predicted_excess_kurtosis(model, t, 1.0, sim.quad);
    for (std::size_t k = 0; k < scales.size(); ++k) {
        KurtosisRow row;
        row.scale = scales[k];
        check_scale(row.scale);
        row.predicted = base / row.scale;
        if (replications > 0) {
            RescaleRequest req;
            req.kind = LimitKind::ma_large;
            req.scale = row.scale;
            req.grid = {t};
            req.replications = replications;
            req.seed = seed + k;
            req.threads = threads;
            req.sim = sim;
            const Ensemble ens = rescaled_ensemble(req, model);
            const KurtosisEstimate est = excess_kurtosis(ens, t, 0);
            row.estimated = est.value;
            row.se = est.se;
        }
        rows.push_back(row);
    }
    return rows;
}

cplx stable_radial_symbol(double y, double b, const Tempering* tempering, const QuadOptions& quad) {
    if (!(b > 0.5 && b < 1.0)) throw HypothesisViolated("radial exponent must lie in (1/2, 1)");
    if (y == 0.0) return 0.0;
    const double alpha = 1.0 / b;
    const double ay = std::abs(y);
    const double scale = std::pow(ay, alpha) / b;
    auto orient = [&](cplx v) { return y > 0.0 ? v : std::conj(v); };
    // int_0^inf (e^{iw} - 1 - iw) w^{-alpha-1} dw
    const cplx full = std::tgamma(-alpha) * std::exp(cplx(0.0, -0.5 * std::numbers::pi * alpha));
    if (!tempering) return scale * orient(full);

    if (tempering->kind == Tempering::Kind::indicator) {
        const double a = ay * std::pow(tempering->param, b);
        const cplx part = a <= 2.0 ? lower_series(a, alpha) : full - upper_contour(a, alpha, quad);
        return scale * orient(part);
    }
    const double c = tempering->param;
    auto f = [&](QPoint r) -> QVec {
        QVec v(1);
        const double x = r.value();
        const double w = ay * std::pow(x, b);
        const double w2 = w * w;
        const cplx ph = w < 1e-2 ? cplx(-0.5 * w2 + w2 * w2 / 24.0, -w2 * w / 6.0 + w2 * w2 * w / 120.0)
                                 : expm1(cplx(0.0, w)) - cplx(0.0, w);
        v(0) = ph * std::exp(-c * x) / (x * x);
        return v;
    };
    const double rs = std::min(1.0 / c, std::pow(ay, -alpha));
    return orient(integrate_line(f, 1, 0.0, kInf, {}, rs, quad).value(0));
}

namespace {

template <class W>
auto symbol_integrand(const std::vector<Projection>& proj, W& w_of, bool tempered, const QuadOptions& quad) {
    return [&proj, &w_of, tempered, &quad](QPoint x) -> QVec {
        const Vec w = w_of(x);
        QVec v(1);
        v(0) = 0.0;
        if (w.cwiseAbs().maxCoeff() == 0.0) return v;
        for (const auto& pr : proj) {
            v(0) += pr.atom->weight *
                    stable_radial_symbol(w.dot(pr.v), pr.b, tempered ? &pr.atom->tempering : nullptr, quad);
        }
        return v;
    };
}

template <class W>
cplx limit_chf(const TemperedOpStable& t, W&& w_of, Eigen::Index wdim, double lo, std::vector<double> breaks,
               double line_scale, bool tempered, const QuadOptions& quad) {
    if (wdim != t.B.rows()) throw std::invalid_argument("measure dimension does not match the kernel");
    const auto proj = projections(t);
    auto f = symbol_integrand(proj, w_of, tempered, quad);
    const cplx logchf = integrate_line(f, 1, lo, kInf, std::move(breaks), line_scale, quad).value(0);
    return std::exp(logchf);
}

// int_X0^inf g for g = x^{-beta} times a bounded quasi-periodic factor, beta > 1.
// Dyadic windows [X, 2X] made of whole periods of length 2h; the remainder past
// 2X is W / (2^{beta-1} - 1), accepted once consecutive windows follow the power law.
template <class G>
cplx power_tail(G& g, double X0, double h, double beta, const QuadOptions& quad) {
    const double ratio = std::pow(2.0, 1.0 - beta);
    const double period = 2.0 * h;
    double X = period * std::ceil(X0 / period);
    cplx sum = 0.0, prev = 0.0;
    double err = 0.0;
    for (int k = 0; k < 40; ++k) {
        const long n = static_cast<long>(std::llround(2.0 * X / period)) - static_cast<long>(std::llround(X / period));
        QuadOptions q = quad;
        q.abs_tol = quad.abs_tol / static_cast<double>(n);
        const QuadResult r = integrate_panels(g, 1, X, 2.0 * X, 2 * n, q);
        const cplx W = r.value(0);
        sum += W;
        err += r.error;
        const double tail_err = k > 0 ? std::abs(W - prev * ratio) / (1.0 / ratio - 1.0) : kInf;
        if (tail_err <= std::max(quad.abs_tol, quad.global_tol * std::max(1.0, std::abs(sum)))) {
            if (err > quad.global_tol * std::max(1.0, std::abs(sum))) {
                throw QuadratureNotConverged("panel error " + std::to_string(err) + " in the limit chf tail");
            }
            return sum + W / (1.0 / ratio - 1.0);
        }
        prev = W;
        X *= 2.0;
    }
    throw QuadratureNotConverged("oscillatory tail of the limit chf did not settle");
}

void check_u(const std::vector<double>& times, const std::vector<Vec>& u, Eigen::Index p) {
    if (times.size() != u.size()) throw std::invalid_argument("one u vector per time is required");
    for (const auto& v : u)
        if (v.size() != p) throw std::invalid_argument("u vectors must have length p");
}

}  // namespace

cplx opstable_limit_chf(const std::vector<double>& times, const std::vector<Vec>& u, const MaModel& model,
                        bool tempered, const QuadOptions& quad) {
    const auto p = model.params.dim();
    check_u(times, u, p);
    const TemperedOpStable& t = tos_of(model.mu, "opstable_limit_chf");
    const Mat& H = model.params.hurst.H;
    if (!commute(H, t.B) ||
        (model.params.variant == TimeKernelParams::Variant::general &&
         (!commute(model.params.M_plus, t.B) || !commute(model.params.M_minus, t.B)))) {
        throw NonCommutingUnsupported("limit chf needs B to commute with H and the kernel constants");
    }
    check_local_hypotheses(H, t.B);
    std::vector<double> breaks{0.0};
    double span = 1.0;
    for (double s : times) {
        breaks.push_back(s);
        span = std::max(span, std::abs(s));
    }
    auto w_of = [&](QPoint v) -> Vec {
        Vec w = Vec::Zero(p);
        for (std::size_t j = 0; j < times.size(); ++j) {
            if (u[j].cwiseAbs().maxCoeff() == 0.0) continue;
            w.noalias() += time_kernel(times[j], v, model.params).transpose() * u[j];
        }
        return w;
    };
    return limit_chf(t, w_of, p, -kInf, breaks, span, tempered, quad);
}

cplx opstable_limit_chf(const std::vector<double>& times, const std::vector<Vec>& u, const RhModel& model,
                        bool tempered, const QuadOptions& quad) {
    const auto p = model.params.dim();
    check_u(times, u, p);
    const TemperedOpStable& t = tos_of(model.mu.base, "opstable_limit_chf");
    const Mat B = block_exponent(t, p);
    const Mat& H = model.params.hurst.H;
    if (!commute(H, B) || !commute(model.params.A, CMat(B.cast<cplx>()))) {
        throw NonCommutingUnsupported("limit chf needs B to commute with H and A");
    }
    check_asymptotic_hypotheses(H, model.params.A, B);
    double tmin = 0.0;
    for (double s : times)
        if (s != 0.0) tmin = tmin == 0.0 ? std::abs(s) : std::min(tmin, std::abs(s));
    const double scale = tmin > 0.0 ? 1.0 / tmin : 1.0;
    // <u, 2 Re(G z)> = <w, (Re z, Im z)> with w = 2 (Re G^T u, -Im G^T u)
    auto w_of = [&](QPoint x) -> Vec {
        Vec w = Vec::Zero(2 * p);
        const double xv = x.value();
        for (std::size_t j = 0; j < times.size(); ++j) {
            if (u[j].cwiseAbs().maxCoeff() == 0.0) continue;
            const CMat G = fourier_kernel(times[j], xv, model.params);
            w.head(p) += 2.0 * G.real().transpose() * u[j];
            w.tail(p) -= 2.0 * G.imag().transpose() * u[j];
        }
        return w;
    };
    // |x| <= X0 on the exponential map, the oscillatory tails by dyadic windows
    double tmax = 0.0;
    for (double s : times) tmax = std::max(tmax, std::abs(s));
    if (tmax == 0.0) return 1.0;
    const double h = std::numbers::pi / tmax;
    const double X0 = std::max(8.0 * h, 4.0 * scale);
    const auto proj = projections(t);
    auto f = symbol_integrand(proj, w_of, tempered, quad);
    cplx logchf = integrate_line(f, 1, -X0, X0, {0.0}, scale, quad).value(0);
    // |<w, v>| decays like x^{-1-d}; the symbol is |y|^{1/b} untempered and y^2 tempered
    const double dmin = sorted_real_eigs(model.params.hurst.D).front();
    double beta = kInf;
    for (const auto& pr : proj) beta = std::min(beta, (1.0 + dmin) * (tempered ? 2.0 : 1.0 / pr.b));
    if (!std::isfinite(beta)) return std::exp(logchf);
    for (double sign : {1.0, -1.0}) {
        auto g = [&](double x) { return f(QPoint{0.0, sign * x}); };
        logchf += power_tail(g, X0, h, beta, quad);
    }
    return std::exp(logchf);
}

}  // namespace oflm
