#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <algorithm>
#include <limits>
#include <vector>

#include "oflm/errors.hpp"

namespace oflm {

using QVec = Eigen::VectorXcd;

struct QuadOptions {
    double abs_tol = 1e-8;     // per panel
    double global_tol = 1e-6;  // whole integral, relative to max(1, |I|)
    int max_panels = 200000;
    int min_ray_panels = 32;
    int max_ray_panels = 3000;
    int max_depth = 40;
};

struct QuadResult {
    QVec value;
    double error = 0.0;
    long evaluations = 0;
    long panels = 0;
};

// Integration point u = anchor + offset. Keeping the two apart lets integrands
// form differences such as t - u without cancellation near breakpoints.
struct QPoint {
    double anchor;
    double offset;
    double value() const { return anchor + offset; }
};

namespace quad_detail {

struct GK21 {
    double x[11];
    double wk[11];
    double wg[11];  // zero at Kronrod-only nodes
};
const GK21& gk21();

inline double vnorm(const QVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// One GK21 application on [a,b] in the map variable; g(v) returns a QVec.
template <class G>
void gk_once(G& g, double a, double b, QVec& kron, double& err) {
    const GK21& r = gk21();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    QVec f0 = g(c);
    kron = r.wk[0] * f0;
    QVec gauss = r.wg[0] * f0;
    for (int i = 1; i < 11; ++i) {
        QVec fs = g(c - h * r.x[i]);
        fs += g(c + h * r.x[i]);
        kron += r.wk[i] * fs;
        if (r.wg[i] != 0.0) gauss += r.wg[i] * fs;
    }
    kron *= h;
    gauss *= h;
    err = vnorm(kron - gauss);
}

template <class G>
void gk_adaptive(G& g, double a, double b, double tol, int depth, QVec& acc, double& err,
                 long& evals, int max_depth) {
    QVec k;
    double e;
    gk_once(g, a, b, k, e);
    evals += 21;
    if (!(e <= tol) && depth < max_depth && std::isfinite(e)) {
        const double m = 0.5 * (a + b);
        gk_adaptive(g, a, m, 0.5 * tol, depth + 1, acc, err, evals, max_depth);
        gk_adaptive(g, m, b, 0.5 * tol, depth + 1, acc, err, evals, max_depth);
        return;
    }
    if (!std::isfinite(vnorm(k))) throw QuadratureNotConverged("non-finite integrand value");
    acc += k;
    err += e;
}

}  // namespace quad_detail

// int_0^inf G(v) dv for G decaying geometrically as v -> inf. Unit panels;
// once min_ray_panels are done the remainder is extrapolated per component from
// the ratio of the last two panels.
template <class G>
QuadResult ray_integral(G&& g, Eigen::Index dim, const QuadOptions& opt) {
    QuadResult res;
    res.value = QVec::Zero(dim);
    QVec prev = QVec::Zero(dim), ratio(dim), last_ratio(dim);
    bool have_last = false;
    const int cap = std::min(opt.max_panels, opt.max_ray_panels);
    for (int j = 0; j < cap; ++j) {
        QVec panel = QVec::Zero(dim);
        double e = 0.0;
        quad_detail::gk_adaptive(g, j, j + 1.0, opt.abs_tol, 0, panel, e, res.evaluations,
                                 opt.max_depth);
        res.value += panel;
        res.error += e;
        ++res.panels;

        bool valid = j > 0;
        for (Eigen::Index c = 0; valid && c < dim; ++c) {
            const std::complex<double> p = panel(c), q = prev(c);
            if (p == 0.0) {
                ratio(c) = 0.0;
            } else if (q == 0.0) {
                valid = false;
            } else {
                ratio(c) = p / q;
                if (std::abs(ratio(c)) >= 0.999) valid = false;
            }
        }
        if (valid && have_last && j + 1 >= opt.min_ray_panels) {
            QVec tail(dim);
            double tail_err = 0.0;
            for (Eigen::Index c = 0; c < dim; ++c) {
                const std::complex<double> r = ratio(c);
                tail(c) = panel(c) * r / (1.0 - r);
                const double a = 1.0 - std::abs(r);
                tail_err = std::max(tail_err, std::abs(panel(c)) * std::abs(r - last_ratio(c)) / (a * a));
            }
            if (tail_err <= opt.abs_tol) {
                res.value += tail;
                res.error += tail_err;
                return res;
            }
        }
        have_last = valid;
        if (valid) last_ratio = ratio;
        prev = panel;
    }
    throw QuadratureNotConverged("ray integral did not settle within the panel budget");
}

// int_lo^hi f(u) du with lo/hi possibly infinite; f takes a QPoint. The line is
// split at the breakpoints, and every piece is reached through an exponential
// map anchored at a breakpoint so integrable endpoint singularities are resolved.
template <class F>
QuadResult integrate_line(F&& f, Eigen::Index dim, double lo, double hi,
                          std::vector<double> breaks, double scale, const QuadOptions& opt) {
    QuadResult total;
    total.value = QVec::Zero(dim);
    if (!(lo < hi)) return total;
    std::vector<double> pts;
    if (std::isfinite(lo)) pts.push_back(lo);
    for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
    if (std::isfinite(hi)) pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.empty()) pts.push_back(0.0);
    const double w = scale > 0.0 ? scale : 1.0;

    auto add = [&](const QuadResult& r) {
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
        total.panels += r.panels;
    };
    // Ray from anchor c: offsets sign*len*e^{-v}, v >= 0.
    auto near_ray = [&](double c, double len, double sign) {
        auto g = [&](double v) -> QVec {
            const double o = len * std::exp(-v);
            return f(QPoint{c, sign * o}) * o;
        };
        add(ray_integral(g, dim, opt));
    };
    // Offsets sign*w*e^{v}, v >= 0.
    auto far_ray = [&](double c, double sign) {
        auto g = [&](double v) -> QVec {
            const double o = w * std::exp(v);
            return f(QPoint{c, sign * o}) * o;
        };
        add(ray_integral(g, dim, opt));
    };

    if (!std::isfinite(lo)) {
        near_ray(pts.front(), w, -1.0);
        far_ray(pts.front(), -1.0);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const double half = 0.5 * (b - a);
        near_ray(a, half, 1.0);
        near_ray(b, half, -1.0);
    }
    if (!std::isfinite(hi)) {
        near_ray(pts.back(), w, 1.0);
        far_ray(pts.back(), 1.0);
    }
    const double mag = std::max(1.0, quad_detail::vnorm(total.value));
    if (total.error > opt.global_tol * mag) {
        throw QuadratureNotConverged("estimated error " + std::to_string(total.error) +
                                     " exceeds global budget");
    }
    return total;
}

// Uniform panels on [a,b], each integrated adaptively.
template <class F>
QuadResult integrate_panels(F&& f, Eigen::Index dim, double a, double b, long n_panels,
                            const QuadOptions& opt) {
    QuadResult res;
    res.value = QVec::Zero(dim);
    if (!(a < b) || n_panels <= 0) return res;
    if (n_panels > opt.max_panels) throw QuadratureNotConverged("panel budget exceeded");
    const double h = (b - a) / static_cast<double>(n_panels);
    auto g = [&](double x) -> QVec { return f(x); };
    for (long j = 0; j < n_panels; ++j) {
        const double pa = a + h * static_cast<double>(j);
        const double pb = j + 1 == n_panels ? b : pa + h;
        quad_detail::gk_adaptive(g, pa, pb, opt.abs_tol, 0, res.value, res.error, res.evaluations,
                                 opt.max_depth);
    }
    res.panels = n_panels;
    return res;
}

}  // namespace oflm
