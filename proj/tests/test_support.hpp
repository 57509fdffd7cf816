// test_support.hpp: shared fixtures and random states for the unit tests.

#pragma once

#include <cmath>
#include <random>

#include "natcorr/bath.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/operators.hpp"

namespace natcorr::testing {

/// eps = W = beta = 1 with 30 explicit Matsubara poles.
inline const CorrelationKernel& reference_kernel() {
    static const CorrelationKernel k = fit_exponential_mixture(LorentzDrude{1.0, 1.0}, 30);
    return k;
}

inline SystemModel reference_model() { return SystemModel::spin_boson(1.0); }

/// Uniform in the Bloch ball.
inline BlochVector random_bloch(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        BlochVector b{u(rng), u(rng), u(rng)};
        if (b.norm() <= 1.0) return b;
    }
}

inline DensityMatrix random_density(std::mt19937& rng) { return bloch_to_density(random_bloch(rng)); }

inline ComplexMatrix random_matrix(std::mt19937& rng, Eigen::Index d) {
    std::normal_distribution<double> n;
    ComplexMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    return m;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace natcorr::testing
