// exp_integrals.hpp: numerically stable closed forms for integrals of complex
// exponentials over intervals and triangles. Every O(lambda^2) quantity in the
// library reduces to sums of these once C(t) is an exponential mixture.

#pragma once

#include <complex>

namespace natcorr {

/// (e^x - 1)/x, continuous through x = 0.
std::complex<double> phi1(std::complex<double> x);

/// int_0^1 s^n e^{x s} ds.
std::complex<double> exp_moment(int n, std::complex<double> x);

/// (phi1(a) - phi1(b))/(a - b), continuous through a = b.
std::complex<double> phi1_divided_difference(std::complex<double> a, std::complex<double> b);

/// int_0^t e^{z s} ds.
inline std::complex<double> exp_integral(std::complex<double> z, double t) { return t * phi1(z * t); }

/// int int_{u, v >= 0, u + v <= t} e^{z u + w v} du dv.
inline std::complex<double> simplex_exp_integral(std::complex<double> z, std::complex<double> w, double t) {
    return t * t * phi1_divided_difference(z * t, w * t);
}

}  // namespace natcorr
