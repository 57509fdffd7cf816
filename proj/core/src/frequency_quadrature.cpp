// frequency_quadrature.cpp: adaptive oscillatory quadrature for C(t).
//
// C(t) decays like exp(-min(W, 2 pi/beta) t) while the frequency integrand is
// O(1), so relative accuracy at large t needs far more than double precision
// in the accumulated panel sums. The whole integral runs in float128.

#include "natcorr/frequency_quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/float128.hpp>

namespace natcorr {

namespace {

using Real = boost::multiprecision::float128;
using boost::math::quadrature::gauss_kronrod;

// Panels grow geometrically away from the origin (the integrand varies on the
// scale of w there) but never exceed max_panel (half an oscillation period).
template <class F>
Real integrate_panels(F f, Real lo, Real hi, Real min_panel, Real max_panel, double tol) {
    Real sum = 0;
    Real a = lo;
    while (a < hi) {
        const Real width = std::min(max_panel, std::max(min_panel, a));
        const Real b = std::min(hi, a + width);
        Real err = 0;
        sum += gauss_kronrod<Real, 31>::integrate(f, a, b, 10, Real(tol), &err);
        a = b;
    }
    return sum;
}

}  // namespace

std::complex<double> lorentz_drude_quadrature(const LorentzDrude& ld, double t_in, double rel_tol) {
    ld.validate();
    if (!(t_in > 0.0)) throw std::invalid_argument("lorentz_drude_quadrature: t must be > 0");
    const Real w0 = ld.cutoff;
    const Real beta = ld.beta;
    const Real t = t_in;
    const Real pi = boost::math::constants::pi<Real>();
    const Real half_period = pi / t;
    const double tol = std::max(rel_tol, 1e-32);

    auto j = [&](const Real& w) { return w * w0 * w0 / (w * w + w0 * w0); };

    // Thermal excess J (coth - 1) = 2 J / (e^{beta w} - 1), finite at w = 0.
    auto thermal = [&](const Real& w) -> Real {
        if (w == 0) return 2 / beta;
        return 2 * j(w) / boost::multiprecision::expm1(beta * w) * boost::multiprecision::cos(w * t);
    };
    const Real thermal_end = Real(90) / beta;
    const Real thermal_part =
        integrate_panels(thermal, Real(0), thermal_end, std::min(half_period, 1 / beta), half_period, tol);

    // Quantum part: int_0^inf J(w) e^{i w t} dw, conjugated at the end.
    const Real cutoff = std::max(Real(60) * w0, Real(400) / t);
    auto re_part = [&](const Real& w) { return j(w) * boost::multiprecision::cos(w * t); };
    auto im_part = [&](const Real& w) { return j(w) * boost::multiprecision::sin(w * t); };
    const Real min_panel = std::min(half_period, w0);
    Real re = integrate_panels(re_part, Real(0), cutoff, min_panel, half_period, tol);
    Real im = integrate_panels(im_part, Real(0), cutoff, min_panel, half_period, tol);

    // int_W^inf f e^{i w t} dw = -sum_n (-1)^n f^{(n)}(W) e^{i W t} / (i t)^{n+1}
    // where f^{(n)}(w) = W0^2 (-1)^n n! cos((n+1) theta) / r^{n+1} with
    // w + i W0 = r e^{i theta}.
    const Real r = boost::multiprecision::sqrt(cutoff * cutoff + w0 * w0);
    const Real theta = boost::multiprecision::atan2(w0, cutoff);
    Real factorial = 1;
    for (int n = 0; n < 60; ++n) {
        if (n > 0) factorial *= n;
        const Real deriv_abs = w0 * w0 * factorial * boost::multiprecision::cos((n + 1) * theta) /
                               boost::multiprecision::pow(r, n + 1);
        // (-1)^n f^{(n)} = deriv_abs; term = -deriv_abs e^{i(Wt - (n+1) pi/2)} / t^{n+1}
        const Real scale = -deriv_abs / boost::multiprecision::pow(t, n + 1);
        const Real phase = cutoff * t - (n + 1) * pi / 2;
        re += scale * boost::multiprecision::cos(phase);
        im += scale * boost::multiprecision::sin(phase);
        if (boost::multiprecision::fabs(scale) < Real(1e-40)) break;
    }
    return {static_cast<double>(thermal_part + re), static_cast<double>(-im)};
}

}  // namespace natcorr
