#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oflm/errors.hpp"
#include "oflm/limits.hpp"
#include "oflm/path_io.hpp"

using namespace oflm;
using std::numbers::pi;

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Mat scalar(double x) { return Mat::Constant(1, 1, x); }

Vec v1(double x) { return Vec::Constant(1, x); }

QuadOptions tight() {
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.global_tol = 1e-10;
    return q;
}

// e^{iw} - 1 - iw without cancellation at small w
cplx phase_remainder(double w) {
    if (std::abs(w) < 1e-2) {
        const double w2 = w * w;
        return {-0.5 * w2 + w2 * w2 / 24.0, -w2 * w / 6.0 + w2 * w2 * w / 120.0};
    }
    return {std::cos(w) - 1.0, std::sin(w) - w};
}

// int_0^inf (e^{i y r^b} - 1 - i y r^b) q(r) r^{-2} dr by direct quadrature
cplx radial_oracle(double y, double b, const Tempering& q) {
    auto part = [&](bool im) {
        auto f = [&](double r) {
            if (r < 1e-100) return 0.0;
            const cplx v = phase_remainder(y * std::pow(r, b)) * q(r) / (r * r);
            return im ? v.imag() : v.real();
        };
        if (q.kind == Tempering::Kind::indicator) {
            boost::math::quadrature::tanh_sinh<double> ts;
            return ts.integrate(f, 0.0, q.param);
        }
        boost::math::quadrature::tanh_sinh<double> ts;
        boost::math::quadrature::exp_sinh<double> es;
        return ts.integrate(f, 0.0, 1.0) + es.integrate([&](double v) { return f(1.0 + v); });
    };
    return {part(false), part(true)};
}

// int_0^inf (e^{iw} - 1 - iw) w^{-a-1} dw, periods by Gauss-Kronrod plus an asymptotic tail
cplx stable_integral_oracle(double a) {
    using boost::math::quadrature::gauss_kronrod;
    const double X = 2.0 * pi * 4000.0;
    auto piece = [&](bool im, double lo, double hi) {
        auto f = [&](double w) {
            const cplx v = phase_remainder(w) * std::pow(w, -a - 1.0);
            return im ? v.imag() : v.real();
        };
        return gauss_kronrod<double, 31>::integrate(f, lo, hi, 8, 1e-14);
    };
    cplx s = 0.0;
    {
        boost::math::quadrature::tanh_sinh<double> ts;
        auto fr = [&](double w) { return w < 1e-100 ? 0.0 : phase_remainder(w).real() * std::pow(w, -a - 1.0); };
        auto fi = [&](double w) { return w < 1e-100 ? 0.0 : phase_remainder(w).imag() * std::pow(w, -a - 1.0); };
        s += cplx(ts.integrate(fr, 0.0, 2.0 * pi), ts.integrate(fi, 0.0, 2.0 * pi));
    }
    for (double lo = 2.0 * pi; lo < X - 1.0; lo += 2.0 * pi) s += cplx(piece(false, lo, lo + 2 * pi), piece(true, lo, lo + 2 * pi));
    // int_X^inf e^{iw} w^{-a-1} dw ~ i e^{iX} X^{-a-1}; the polynomial part is exact
    s += cplx(0.0, 1.0) * std::exp(cplx(0.0, X)) * std::pow(X, -a - 1.0);
    s += cplx(-std::pow(X, -a) / a, -std::pow(X, 1.0 - a) / (a - 1.0));
    return s;
}

// int |g_1(s)|^a ds for the one-sided scalar kernel with exponent d
double kernel_power_integral(double d, double a) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    auto diff = [&](double u) { return std::abs(std::pow(u, d) * std::expm1(d * std::log1p(1.0 / u))); };
    auto left = [&](double u) { return u < 1e-100 ? 1.0 : std::pow(diff(u), a); };
    const double neg = ts.integrate(left, 0.0, 1.0) + es.integrate([&](double v) { return left(1.0 + v); });
    return neg + 1.0 / (1.0 + d * a);
}

std::vector<SphereAtom> symmetric_atoms(double r0) {
    return {{v1(1.0), 0.5, {Tempering::Kind::indicator, r0}}, {v1(-1.0), 0.5, {Tempering::Kind::indicator, r0}}};
}

MaModel local_model(double eps = 1e-3) {
    return {TimeKernelParams::general(make_hurst(scalar(0.4)), scalar(1.0), scalar(0.0)),
            LevyMeasure::tempered(scalar(0.75), symmetric_atoms(1.0), eps, true)};
}

std::string csv(const Ensemble& e) {
    std::ostringstream os;
    write_ensemble_csv(os, e);
    return os.str();
}

}  // namespace

TEST(Exponents, SumToTwiceH) {
    const Mat H = mat2(0.7, 0.1, -0.05, 0.35), B = mat2(0.8, 0.05, 0.02, 0.6);
    EXPECT_LT((hurst_local(H, B) + hurst_asymptotic(H, B) - 2.0 * H).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((hurst_local(H, B) - (H + B - 0.5 * Mat::Identity(2, 2))).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(hurst_local(H, scalar(0.7)), std::invalid_argument);
}

TEST(Hypotheses, LocalAndAsymptotic) {
    EXPECT_NO_THROW(check_local_hypotheses(scalar(0.4), scalar(0.75)));
    // 0.3 + 0.75 >= 1
    EXPECT_THROW(check_local_hypotheses(scalar(0.8), scalar(0.75)), HypothesisViolated);
    EXPECT_THROW(check_local_hypotheses(scalar(0.4), scalar(0.45)), HypothesisViolated);
    EXPECT_THROW(check_local_hypotheses(mat2(0.4, 0.1, 0.0, 0.3), mat2(0.75, 0.0, 0.0, 0.6)), HypothesisViolated);
    EXPECT_NO_THROW(check_asymptotic_hypotheses(scalar(0.7), CMat::Ones(1, 1), scalar(0.75)));
    // 0.2 + 0.5 - 0.9 <= 0
    EXPECT_THROW(check_asymptotic_hypotheses(scalar(0.2), CMat::Ones(1, 1), scalar(0.9)), HypothesisViolated);
    try {
        check_local_hypotheses(scalar(0.8), scalar(0.75));
    } catch (const HypothesisViolated& e) {
        EXPECT_EQ(e.error_class(), ErrorClass::hypothesis);
    }
}

TEST(RadialSymbol, UntemperedClosedForm) {
    for (double b : {0.6, 0.75, 0.9}) {
        const double a = 1.0 / b;
        const cplx ref = stable_integral_oracle(a);
        for (double y : {0.7, -2.0}) {
            const cplx v = stable_radial_symbol(y, b, nullptr);
            const cplx expect = std::pow(std::abs(y), a) / b * (y > 0 ? ref : std::conj(ref));
            EXPECT_LT(std::abs(v - expect), 1e-6 * std::abs(expect)) << b << " " << y;
        }
    }
    EXPECT_EQ(stable_radial_symbol(0.0, 0.75, nullptr), cplx(0.0));
    EXPECT_THROW(stable_radial_symbol(1.0, 0.4, nullptr), HypothesisViolated);
}

TEST(RadialSymbol, IndicatorAgainstQuadrature) {
    const double b = 0.75;
    // y r0^b below and above the switch point 2
    for (double r0 : {0.3, 1.0, 4.0, 40.0}) {
        const Tempering q{Tempering::Kind::indicator, r0};
        for (double y : {1.0, -1.5}) {
            const cplx v = stable_radial_symbol(y, b, &q, tight());
            EXPECT_LT(std::abs(v - radial_oracle(y, b, q)), 1e-8) << r0 << " " << y;
        }
    }
}

TEST(RadialSymbol, ContinuousAcrossSwitch) {
    const double b = 0.8;
    // a = y r0^b = 2 at r0 = 2^{1/b}
    const double r_switch = std::pow(2.0, 1.0 / b);
    const Tempering lo{Tempering::Kind::indicator, r_switch * (1 - 1e-9)};
    const Tempering hi{Tempering::Kind::indicator, r_switch * (1 + 1e-9)};
    EXPECT_LT(std::abs(stable_radial_symbol(1.0, b, &lo, tight()) - stable_radial_symbol(1.0, b, &hi, tight())), 1e-8);
}

TEST(RadialSymbol, ExponentialAgainstQuadrature) {
    for (double c : {0.5, 2.0}) {
        const Tempering q{Tempering::Kind::exponential, c};
        for (double y : {0.8, -3.0}) {
            EXPECT_LT(std::abs(stable_radial_symbol(y, 0.7, &q, tight()) - radial_oracle(y, 0.7, q)), 1e-8) << c << " " << y;
        }
    }
}

TEST(OpstableChf, SymmetricScalarClosedForm) {
    // log chf = (|u|^a / b) Gamma(-a) cos(pi a/2) int |g_1|^a ds for symmetric unit atoms
    const MaModel model = local_model();
    const double b = 0.75, a = 1.0 / b, d = -0.1;
    const double G = kernel_power_integral(d, a);
    for (double u : {0.1, 0.35, 0.8}) {
        const double ref = std::exp(std::pow(u, a) / b * std::tgamma(-a) * std::cos(pi * a / 2) * G);
        const cplx v = opstable_limit_chf({1.0}, {v1(u)}, model, false, tight());
        EXPECT_NEAR(v.real(), ref, 1e-7) << u;
        EXPECT_NEAR(v.imag(), 0.0, 1e-9) << u;
    }
}

TEST(OpstableChf, NormalisationAndSelfSimilarity) {
    const MaModel model = local_model();
    EXPECT_EQ(opstable_limit_chf({1.0}, {v1(0.0)}, model), cplx(1.0));
    // one-sided atoms give a complex chf
    const MaModel skew{model.params,
                       LevyMeasure::tempered(scalar(0.75), {{v1(1.0), 1.0, {Tempering::Kind::indicator, 1.0}}})};
    const double h1 = 0.4 + 0.75 - 0.5;
    for (double u : {0.3, 1.2}) {
        const cplx a = opstable_limit_chf({2.0}, {v1(u)}, skew, false, tight());
        const cplx b = opstable_limit_chf({1.0}, {v1(std::pow(2.0, h1) * u)}, skew, false, tight());
        EXPECT_LE(std::abs(a), 1.0);
        EXPECT_GT(std::abs(a.imag()), 1e-3);
        EXPECT_LT(std::abs(a - b), 1e-8) << u;
    }
    // the tempered process is not self-similar
    const cplx ta = opstable_limit_chf({2.0}, {v1(1.2)}, skew, true, tight());
    const cplx tb = opstable_limit_chf({1.0}, {v1(std::pow(2.0, h1) * 1.2)}, skew, true, tight());
    EXPECT_GT(std::abs(ta - tb), 1e-3);
    EXPECT_THROW(opstable_limit_chf({1.0, 2.0}, {v1(1.0)}, model), std::invalid_argument);
}

TEST(OpstableChf, HarmonizableSelfSimilarity) {
    std::vector<SphereAtom> atoms;
    for (int k = 0; k < 3; ++k) {
        const double th = 2 * pi * k / 3 + 0.2;
        atoms.push_back({(Vec(2) << std::cos(th), std::sin(th)).finished(), 0.4, {Tempering::Kind::indicator, 1.0}});
    }
    const RhModel model{FourierKernelParams::make(make_hurst(scalar(0.7)), CMat::Ones(1, 1)),
                        ComplexLevyView::make(LevyMeasure::tempered(0.75 * Mat::Identity(2, 2), atoms))};
    const double h2 = 0.7 + 0.5 - 0.75;
    // default tolerances: the oscillatory tail makes the tight profile slow
    const cplx a = opstable_limit_chf({2.0}, {v1(0.05)}, model);
    const cplx b = opstable_limit_chf({1.0}, {v1(std::pow(2.0, h2) * 0.05)}, model);
    EXPECT_LT(std::abs(a - b), 1e-5);
    EXPECT_LT(std::abs(a), 0.99);
    EXPECT_GT(std::abs(a), 0.05);
    // homogeneity of the untempered symbol: log chf(l u) = l^{1/b} log chf(u)
    const cplx c = opstable_limit_chf({2.0}, {v1(0.1)}, model);
    EXPECT_LT(std::abs(std::log(c) - std::pow(2.0, 1.0 / 0.75) * std::log(a)), 1e-5);
    EXPECT_EQ(opstable_limit_chf({1.0}, {v1(0.0)}, model), cplx(1.0));
}

TEST(OpstableChf, StructureRestrictions) {
    // atom off the eigen-directions of a non-scalar B
    const auto mu = LevyMeasure::tempered(mat2(0.75, 0.0, 0.0, 0.6),
                                          {{(Vec(2) << std::sqrt(0.5), std::sqrt(0.5)).finished(), 1.0, {}}});
    const MaModel model{TimeKernelParams::general(make_hurst(0.4 * Mat::Identity(2, 2)), Mat::Identity(2, 2),
                                                  Mat::Zero(2, 2)),
                        mu};
    EXPECT_THROW(opstable_limit_chf({1.0}, {Vec::Ones(2)}, model), UnsupportedStructure);
    const MaModel plain{model.params, LevyMeasure::discrete({{Vec::Ones(2), 1.0}})};
    EXPECT_THROW(opstable_limit_chf({1.0}, {Vec::Ones(2)}, plain), ValidationError);
}

TEST(Rescale, UnitScaleIsPlainSimulation) {
    const MaModel model{TimeKernelParams::general(make_hurst(scalar(0.7)), scalar(1.0), scalar(0.5)),
                        LevyMeasure::discrete({{v1(1.0), 0.6}, {v1(-2.0), 0.3}})};
    RescaleRequest req;
    req.kind = LimitKind::ma_large;
    req.scale = 1.0;
    req.grid = {0.5, 1.0};
    req.replications = 25;
    req.seed = 99;
    const MaSimulator sim(model.params, model.mu, req.grid);
    const Ensemble plain = run_ensemble(25, 99, 0, [&](Rng& r) { return sim.path(r); });
    EXPECT_EQ(csv(rescaled_ensemble(req, model)), csv(plain));
}

TEST(Rescale, KindMustMatchRepresentation) {
    RescaleRequest req;
    req.kind = LimitKind::rh_small;
    req.grid = {1.0};
    req.replications = 2;
    EXPECT_THROW(rescaled_ensemble(req, local_model()), std::invalid_argument);
    req.scale = -1.0;
    req.kind = LimitKind::ma_large;
    EXPECT_THROW(rescaled_ensemble(req, local_model()), ValidationError);
}

TEST(Rescale, LocalNeedsCommutingConstants) {
    const MaModel model{TimeKernelParams::general(make_hurst(0.4 * Mat::Identity(2, 2)), mat2(1.0, 0.3, 0.0, 1.0),
                                                  Mat::Zero(2, 2)),
                        LevyMeasure::tempered(mat2(0.75, 0.0, 0.0, 0.6),
                                              {{(Vec(2) << 1.0, 0.0).finished(), 1.0, {}}})};
    RescaleRequest req;
    req.kind = LimitKind::ma_local;
    req.scale = 0.1;
    req.grid = {1.0};
    req.replications = 2;
    EXPECT_THROW(rescaled_ensemble(req, model), NonCommutingUnsupported);
}

TEST(Rescale, DirectAndRetemperedAgreeInVariance) {
    const MaModel model = local_model(0.05);
    RescaleRequest req;
    req.kind = LimitKind::ma_local;
    req.scale = 0.25;
    req.grid = {1.0};
    req.replications = 3000;
    req.seed = 5;
    const CovEstimate a = sample_cov(rescaled_ensemble(req, model), 1.0, 1.0);
    req.direct = true;
    req.seed = 6;
    const CovEstimate b = sample_cov(rescaled_ensemble(req, model), 1.0, 1.0);
    const double se = std::hypot(a.se(0, 0), b.se(0, 0));
    EXPECT_LT(std::abs(a.value(0, 0) - b.value(0, 0)), 4.0 * se);
    // exact variance of the rescaled process
    const double var = 1.0 * time_isometry(1.0, 1.0, model.params,
                                           second_moment(rescale_tempering(model.mu, 0.25)), tight())(0, 0);
    EXPECT_LT(std::abs(a.value(0, 0) - var), 4.0 * a.se(0, 0));
}

TEST(Kurtosis, FourthMoments) {
    EXPECT_DOUBLE_EQ(fourth_moment(LevyMeasure::discrete({{v1(2.0), 0.5}, {v1(-1.0), 3.0}})), 8.0 + 3.0);
    EXPECT_DOUBLE_EQ(fourth_moment(LevyMeasure::gaussian(scalar(2.0), 1.5)), 3.0 * 1.5 * 4.0);
    const double b = 0.75;
    const auto ind = LevyMeasure::tempered(scalar(b), {{v1(1.0), 2.0, {Tempering::Kind::indicator, 1.5}}});
    EXPECT_NEAR(fourth_moment(ind), 2.0 * std::pow(1.5, 4 * b - 1) / (4 * b - 1), 1e-14);
    const auto ex = LevyMeasure::tempered(scalar(b), {{v1(-1.0), 0.7, {Tempering::Kind::exponential, 2.0}}});
    boost::math::quadrature::exp_sinh<double> es;
    const double ref = 0.7 * es.integrate([&](double r) { return std::pow(r, 4 * b - 2) * std::exp(-2.0 * r); });
    EXPECT_NEAR(fourth_moment(ex), ref, 1e-10 * ref);
    EXPECT_THROW(fourth_moment(LevyMeasure::discrete({{Vec::Ones(2), 1.0}})), std::invalid_argument);
}

TEST(Kurtosis, PredictionAgainstKernelIntegrals) {
    const double H = 0.7, d = H - 0.5;
    const MaModel model{TimeKernelParams::general(make_hurst(scalar(H)), scalar(1.0), scalar(0.0)),
                        LevyMeasure::discrete({{v1(1.0), 0.5}, {v1(-1.0), 0.5}})};
    // int g^4 / (int g^2)^2 with m4 = m2 = 1
    const double g2 = kernel_power_integral(d, 2.0), g4 = kernel_power_integral(d, 4.0);
    const double ref = g4 / (g2 * g2);
    EXPECT_NEAR(predicted_excess_kurtosis(model, 1.0, 1.0, tight()), ref, 1e-8 * ref);
    for (double c : {4.0, 16.0}) {
        EXPECT_NEAR(predicted_excess_kurtosis(model, 1.0, c, tight()) * c, predicted_excess_kurtosis(model, 1.0, 1.0, tight()),
                    1e-14);
    }
    const auto rows = kurtosis_scaling(model, 1.0, {1.0, 4.0}, 0, 1, 0);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_DOUBLE_EQ(rows[1].predicted * 4.0, rows[0].predicted);
    EXPECT_EQ(rows[1].se, 0.0);
}

TEST(GaussianDistance, OfbmEnsembleWithinTolerance) {
    const Mat H = scalar(0.7), Sigma = scalar(1.0);
    const std::vector<double> grid{0.5, 1.0};
    Mat target(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) target(i, j) = cov_ofbm_reversible(grid[i], grid[j], H, Sigma)(0, 0);
    const Ensemble ens = run_ensemble(20000, 17, 0, [&](Rng& r) { return ofbm_path(target, grid, r); });
    const std::vector<std::vector<Vec>> u{{v1(0.5), v1(0.5)}, {v1(-1.0), v1(0.3)}};
    const GaussianLimitDistance g = gaussian_limit_distance(ens, target, grid, u);
    EXPECT_LT(g.cov_z, 4.0);
    EXPECT_LT(g.chf_distance, g.chf_ci);
    ASSERT_EQ(g.kurtosis.size(), 2u);
    for (const auto& k : g.kurtosis) EXPECT_LT(std::abs(k.value), 4.0 * k.se);
    EXPECT_GT(gaussian_limit_distance(ens, 2.0 * target, grid, u).cov_z, 10.0);
    EXPECT_THROW(gaussian_limit_distance(ens, scalar(1.0), grid, u), std::invalid_argument);
}
