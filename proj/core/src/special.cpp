// special.cpp: phi-functions of complex arguments.

#include "natcorr/exp_integrals.hpp"

#include <algorithm>
#include <cmath>

namespace natcorr {

using C = std::complex<double>;

C phi1(C x) {
    if (std::abs(x) < 0.5) {
        // sum x^k/(k+1)!
        C term = 1.0;
        C sum = 1.0;
        for (int k = 1; k < 30; ++k) {
            term *= x / static_cast<double>(k + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(x) - 1.0) / x;
}

C exp_moment(int n, C x) {
    const double ax = std::abs(x);
    if (ax <= std::max(8.0, static_cast<double>(n) + 2.0)) {
        // sum_k x^k / (k! (n + k + 1))
        C pow_over_fact = 1.0;
        C sum = 1.0 / static_cast<double>(n + 1);
        for (int k = 1; k < 200; ++k) {
            pow_over_fact *= x / static_cast<double>(k);
            const C term = pow_over_fact / static_cast<double>(n + k + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && static_cast<double>(k) > ax) break;
        }
        return sum;
    }
    const C ex = std::exp(x);
    C psi = (ex - 1.0) / x;
    for (int k = 1; k <= n; ++k) {
        psi = (ex - static_cast<double>(k) * psi) / x;
    }
    return psi;
}

C phi1_divided_difference(C a, C b) {
    const double big = std::max(std::abs(a), std::abs(b));
    if (big <= 1.0) {
        // sum_{p,q} a^p b^q / (p+q+2)!
        C sum = 0.0;
        C inv_fact = 0.5;  // 1/(N+2)! at N = 0
        for (int order = 0; order < 30; ++order) {
            C homogeneous = 0.0;
            C ap = 1.0;
            for (int p = 0; p <= order; ++p) {
                homogeneous += ap * std::pow(b, order - p);
                ap *= a;
            }
            const C term = homogeneous * inv_fact;
            sum += term;
            inv_fact /= static_cast<double>(order + 3);
            if (order > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    const C h = 0.5 * (a - b);
    if (std::abs(h) < 0.1) {
        // Central difference of phi1 expanded around the midpoint.
        const C m = 0.5 * (a + b);
        C sum = 0.0;
        C hpow = 1.0;
        double fact = 1.0;
        for (int k = 0; k < 8; ++k) {
            sum += exp_moment(2 * k + 1, m) * hpow / fact;
            hpow *= h * h;
            fact *= static_cast<double>((2 * k + 2) * (2 * k + 3));
        }
        return sum;
    }
    return (phi1(a) - phi1(b)) / (a - b);
}

}  // namespace natcorr
