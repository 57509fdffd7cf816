// test_master_equation.cpp: Redfield generator, Lambda_t, propagation,
// stationary states and positivity loss.

#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "natcorr/master_equation.hpp"
#include "test_support.hpp"

namespace natcorr {
namespace {

using testing::max_abs;
using testing::random_density;
using testing::reference_kernel;
using testing::reference_model;

const LorentzDrude kUnitBath{1.0, 1.0};

/// int_t^inf C(s) X(-s) ds by direct quadrature of the full Matsubara series,
/// with X(-s) = S^x cos(eps s) + S^y sin(eps s).
ComplexMatrix theta_by_quadrature(double t) {
    const auto integrate = [t](auto f) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate(f, t, std::numeric_limits<double>::infinity());
    };
    const double re_c = integrate([](double s) { return lorentz_drude_series(kUnitBath, s).real() * std::cos(s); });
    const double im_c = integrate([](double s) { return lorentz_drude_series(kUnitBath, s).imag() * std::cos(s); });
    const double re_s = integrate([](double s) { return lorentz_drude_series(kUnitBath, s).real() * std::sin(s); });
    const double im_s = integrate([](double s) { return lorentz_drude_series(kUnitBath, s).imag() * std::sin(s); });
    return Complex(re_c, im_c) * spin::sx() + Complex(re_s, im_s) * spin::sy();
}

/// Lambda_0 assembled column by column from its operator definition.
Superoperator lambda0_brute_force(const ComplexMatrix& x, const ComplexMatrix& theta, double lambda) {
    const Eigen::Index d = x.rows();
    ComplexMatrix m(d * d, d * d);
    for (Eigen::Index c = 0; c < d * d; ++c) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(c % d, c / d) = 1.0;
        const ComplexMatrix out = lambda * lambda * (commutator(x, theta * e) - commutator(x, e * theta.adjoint()));
        m.col(c) = vec(out);
    }
    return Superoperator(d, m);
}

TEST(Redfield, ThetaMatchesHalfFourierForm) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const auto& k = reference_kernel();
    const ComplexMatrix expected = 0.5 * (spin::splus() * k.half_fourier(-1.0) + spin::sminus() * k.half_fourier(1.0));
    EXPECT_LT(max_abs(g.theta - expected), 1e-14);
}

TEST(Redfield, ThetaMatchesIndependentQuadrature) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    EXPECT_LT(max_abs(g.theta - theta_by_quadrature(0.0)), 1e-8);
}

TEST(Redfield, MatchesBruteForceExpansion) {
    for (double lambda : {0.1, 0.5}) {
        const auto g = build_redfield_generator(reference_model(), reference_kernel(), lambda);
        const auto brute = lambda0_brute_force(spin::sx(), g.theta, lambda);
        EXPECT_LT(max_abs(g.lambda0.matrix() - brute.matrix()), 1e-10);
        const Superoperator free = Complex(0.0, -1.0) * commutator_superoperator(reference_model().hamiltonian);
        EXPECT_LT(max_abs(g.liouvillian.matrix() - (free - g.lambda0).matrix()), 1e-14);
    }
}

TEST(Redfield, ZeroCouplingIsFreeEvolution) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.0);
    EXPECT_EQ(max_abs(g.lambda0.matrix()), 0.0);
    EXPECT_THROW(build_redfield_generator(reference_model(), reference_kernel(), -1.0), std::invalid_argument);
}

TEST(Redfield, TraceAnnihilating) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        const ComplexMatrix rho = random_density(rng).matrix();
        EXPECT_LT(std::abs(g.lambda0.apply(rho).trace()), 1e-14);
        EXPECT_LT(std::abs(g.liouvillian.apply(rho).trace()), 1e-14);
    }
}

TEST(Redfield, HermiticityPreserving) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    std::mt19937 rng(12);
    const ComplexMatrix rho = random_density(rng).matrix();
    EXPECT_LT(hermiticity_residual(g.liouvillian.apply(rho)), 1e-14);
}

TEST(Redfield, LambdaSquaredHomogeneous) {
    const auto a = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const auto b = build_redfield_generator(reference_model(), reference_kernel(), 0.25);
    EXPECT_NEAR(a.lambda0.norm(), 4.0 * b.lambda0.norm(), 1e-14 * a.lambda0.norm());
    EXPECT_LT(max_abs(a.lambda0.matrix() - 4.0 * b.lambda0.matrix()), 1e-15);
}

TEST(Redfield, DetailedBalanceOfEmbeddedRates) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    // Theta = (S^+ Gamma(-eps) + S^- Gamma(eps)) / 2.
    const double emission = 2.0 * g.theta(1, 0).real();
    const double absorption = 2.0 * g.theta(0, 1).real();
    EXPECT_NEAR(emission / absorption, std::exp(1.0), 1e-6 * std::exp(1.0));
}

TEST(LambdaT, EqualsLambda0AtZeroAndDecays) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    EXPECT_LT(max_abs(build_lambda_t(g, 0.0).matrix() - g.lambda0.matrix()), 1e-12);
    const double late = build_lambda_t(g, 40.0 * reference_kernel().tau_r()).norm();
    EXPECT_LT(late, 1e-8 * g.lambda0.norm());
    EXPECT_THROW(build_lambda_t(g, -1.0), std::invalid_argument);
}

TEST(LambdaT, TailKernelsMatchDirectQuadrature) {
    const double t = 1.0;
    EXPECT_LT(max_abs(theta_operator(reference_model(), reference_kernel(), t) - theta_by_quadrature(t)), 1e-8);
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const auto brute = lambda0_brute_force(spin::sx(), theta_by_quadrature(t), 0.5);
    EXPECT_LT(max_abs(build_lambda_t(g, t).matrix() - brute.matrix()), 1e-7);
}

TEST(Markovian, FreePrecessionAtZeroCoupling) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.0);
    const std::vector<double> times{0.0, 0.5 * std::numbers::pi, std::numbers::pi};
    const auto traj = propagate_markovian(g, bloch_to_density({1.0, 0.0, 0.0}), times);
    const BlochVector quarter = density_to_bloch(traj.states[1]);
    const BlochVector half = density_to_bloch(traj.states[2]);
    EXPECT_NEAR(quarter.y, 1.0, 1e-10);  // counter-clockwise about z
    EXPECT_NEAR(half.x, -1.0, 1e-10);
    EXPECT_NEAR(half.y, 0.0, 1e-10);
    EXPECT_NEAR(half.z, 0.0, 1e-10);
}

TEST(Markovian, RelaxesToDetailedBalanceState) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.1);
    const std::vector<double> times{3000.0};
    const auto traj = propagate_markovian(g, bloch_to_density({1.0, 0.0, 0.0}), times);
    const BlochVector b = density_to_bloch(traj.states[0]);
    EXPECT_NEAR(b.z, -std::tanh(0.5), 0.01);
    EXPECT_NEAR(std::hypot(b.x, b.y), 0.0, 0.01);
}

TEST(Markovian, TraceHermiticityAndSemigroup) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    std::mt19937 rng(13);
    const DensityMatrix rho0 = random_density(rng);
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.25 * i);
    const auto traj = propagate_markovian(g, rho0, times);
    for (const auto& s : traj.states) {
        EXPECT_LT(std::abs(s.trace() - 1.0), 1e-10);
        EXPECT_LT(hermiticity_residual(s), 1e-10);
    }
    const std::vector<double> t1{3.0};
    const auto first = propagate_markovian(g, rho0, t1);
    const auto second = propagate_markovian(g, DensityMatrix(first.states[0]), std::vector<double>{4.0});
    EXPECT_LT(max_abs(second.states[0] - traj.states[28]), 1e-10);
}

TEST(Markovian, RejectsDescendingTimes) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const std::vector<double> times{1.0, 0.5};
    EXPECT_THROW(propagate_markovian(g, bloch_to_density({}), times), std::invalid_argument);
}

TEST(Tcl2, ZeroCouplingIsFreeEvolution) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.0);
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i) times.push_back(0.3 * i);
    const auto rho0 = bloch_to_density({0.6, 0.0, 0.3});
    const auto a = propagate_tcl2(g, rho0, times, 1.0);
    const auto b = propagate_markovian(g, rho0, times);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_LT(max_abs(a.states[i] - b.states[i]), 1e-10);
}

TEST(Tcl2, NaturalCorrelationTracksMarkovianToThirdOrder) {
    const double lambda = 0.1;
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), lambda);
    std::vector<double> times;
    for (int i = 0; i <= 60; ++i) times.push_back(0.5 * i);
    const auto rho0 = bloch_to_density({1.0, 0.0, 0.0});
    const auto tcl = propagate_tcl2(g, rho0, times, 1.0);
    const auto markov = propagate_markovian(g, rho0, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        worst = std::max(worst, trace_distance(tcl.states[i], markov.states[i]));
        EXPECT_LT(std::abs(tcl.states[i].trace() - 1.0), 1e-10);
        EXPECT_LT(hermiticity_residual(tcl.states[i]), 1e-10);
    }
    EXPECT_LT(worst, 10.0 * lambda * lambda * lambda);
    // A product initial state departs at O(lambda^2).
    const auto product = propagate_tcl2(g, rho0, times, 0.0);
    double product_gap = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        product_gap = std::max(product_gap, trace_distance(product.states[i], markov.states[i]));
    }
    EXPECT_GT(product_gap, 3.0 * worst);
}

TEST(Tcl2, RejectsBadSign) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.1);
    Tcl2Options o;
    o.correlation_sign = 0;
    const std::vector<double> times{0.0, 1.0};
    EXPECT_THROW(propagate_tcl2(g, bloch_to_density({}), times, 1.0, o), std::invalid_argument);
}

TEST(Stationary, KernelOfGenerator) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.1);
    const StationaryState ss = stationary_state(g);
    EXPECT_FALSE(ss.degenerate);
    EXPECT_LT(ss.residual, 1e-12);
    EXPECT_LT((g.liouvillian.matrix() * vec(ss.state)).norm(), 1e-12);
    EXPECT_NEAR(ss.state.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(density_to_bloch(ss.state).z, -0.462, 0.01);
}

TEST(Stationary, FreeGeneratorIsDegenerate) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.0);
    EXPECT_TRUE(stationary_state(g).degenerate);
}

TEST(Positivity, StationaryAndMixedStatesStayPositive) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const PositivityProbe probe(g);
    const NMembership ss = probe.evaluate(probe.stationary());
    EXPECT_FALSE(ss.in_n);
    EXPECT_FALSE(ss.truncated);
    const NMembership centre = probe.evaluate(bloch_to_density({}).matrix());
    EXPECT_FALSE(centre.in_n);
    EXPECT_FALSE(centre.witness_time.has_value());
}

TEST(Positivity, SomePureStatesOnTheEquatorLosePositivity) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const PositivityProbe probe(g);
    int violations = 0;
    for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 16.0;
        const NMembership n = probe.evaluate(bloch_to_density({std::cos(a), std::sin(a), 0.0}).matrix());
        EXPECT_EQ(n.in_n, n.min_eigenvalue_attained < -1e-12);
        if (n.in_n) {
            ++violations;
            ASSERT_TRUE(n.witness_time.has_value());
            EXPECT_GT(*n.witness_time, 0.0);
        }
    }
    EXPECT_GT(violations, 0);
    const NMembership x = n_membership(g, bloch_to_density({1.0, 0.0, 0.0}));
    EXPECT_TRUE(x.in_n);
}

TEST(Positivity, HorizonFollowsRelaxationRate) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const PositivityProbe probe(g);
    const double rate = std::max(reference_kernel().half_fourier(1.0).real(), reference_kernel().half_fourier(-1.0).real());
    EXPECT_NEAR(probe.t_cap(), 50.0 / (0.25 * rate), 1e-9 * probe.t_cap());
    EXPECT_NEAR(probe.step(), 1.0 / 16.0, 1e-15);
}

}  // namespace
}  // namespace natcorr
