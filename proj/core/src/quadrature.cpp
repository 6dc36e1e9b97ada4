#include "oflm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oflm::quad_detail {

const GK21& gk21() {
    static const GK21 rule = [] {
        GK21 r{};
        const auto& kx = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
        const auto& kw = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
        const auto& gw = boost::math::quadrature::gauss<double, 10>::weights();
        for (int i = 0; i < 11; ++i) {
            r.x[i] = kx[i];
            r.wk[i] = kw[i];
            r.wg[i] = (i % 2 == 1) ? gw[i / 2] : 0.0;
        }
        return r;
    }();
    return rule;
}

}  // namespace oflm::quad_detail
