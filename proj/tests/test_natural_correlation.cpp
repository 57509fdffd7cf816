// test_natural_correlation.cpp: variational bound, U' membership and region scans.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "natcorr/natural_correlation.hpp"
#include "test_support.hpp"

namespace natcorr {
namespace {

using testing::random_density;
using testing::reference_kernel;
using testing::reference_model;

ComplexMatrix heisenberg_x(double t) {
    // X(t) = e^{i H t} S^x e^{-i H t} = S^x cos t - S^y sin t for eps = 1.
    return std::cos(t) * spin::sx() - std::sin(t) * spin::sy();
}

Complex kernel_at_zero(const CorrelationKernel& k) {
    Complex s = 0.0;
    for (const auto& term : k.terms()) s += term.amplitude;
    return s;
}

TEST(AOfT, NonNegativeForRandomStates) {
    std::mt19937 rng(31);
    const VariationalKernel vk(reference_model(), reference_kernel());
    for (int i = 0; i < 40; ++i) {
        const ComplexMatrix rho = random_density(rng).matrix();
        const auto p = vk.project(rho);
        for (double t : {1e-3, 0.1, 1.0, 5.0, 30.0}) {
            const Complex a = VariationalKernel::a_value(p, vk.at(t));
            EXPECT_GE(a.real(), -1e-14);
            EXPECT_LT(std::abs(a.imag()), 1e-12 * (1.0 + std::abs(a)));
        }
    }
}

TEST(AOfT, MatchesDoubleIntegralForSmoothKernel) {
    const DiscreteModes modes{{{0.7, 0.3}, {1.4, 0.5}}, 1.0, std::nullopt};
    const auto k = discrete_kernel(modes, Regularization::Abel);
    const ComplexMatrix rho = bloch_to_density({0.3, -0.2, 0.4}).matrix();
    const HermitianEigen e = hermitian_eigendecomposition(rho);
    const ComplexVector phi = e.vectors.col(0);
    const double t = 2.0;
    const int n = 200;  // Simpson in both variables
    const auto w = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    Complex sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t1 = t * i / n;
        const ComplexVector left = (phi.adjoint() * heisenberg_x(t1) * rho).transpose();
        for (int j = 0; j <= n; ++j) {
            const double t2 = t * j / n;
            const Complex c = t2 == t1 ? kernel_at_zero(k) : k(t2 - t1);
            const Complex inner = (left.transpose() * heisenberg_x(t2) * phi)(0, 0);
            sum += w(i) * w(j) * c * inner;
        }
    }
    sum *= (t / (3.0 * n)) * (t / (3.0 * n));
    EXPECT_NEAR(a_of_t(reference_model(), k, rho, t), sum.real(), 1e-9);
    EXPECT_LT(std::abs(sum.imag()), 1e-9);
}

TEST(BOfT, IsProjectedDeltaRho1) {
    const ComplexMatrix rho = bloch_to_density({0.5, 0.2, -0.3}).matrix();
    const HermitianEigen e = hermitian_eigendecomposition(rho);
    const ComplexVector phi = e.vectors.col(0);
    for (double t : {0.5, 3.0}) {
        const ComplexMatrix d = delta_rho1(reference_model(), reference_kernel(), 1.0, rho, t);
        const double expected = (phi.adjoint() * d * phi)(0, 0).real();
        EXPECT_NEAR(b_of_t(reference_model(), reference_kernel(), rho, t), expected, 1e-14);
    }
}

TEST(VariationalForm, OptimalXiReproducesBound) {
    const double lambda = 0.5;
    const ComplexMatrix rho = bloch_to_density({0.97, 0.0, 0.0}).matrix();
    const VariationalResult r = u_prime_membership(reference_model(), reference_kernel(), lambda, rho);
    const HermitianEigen e = hermitian_eigendecomposition(rho);
    const VariationalProbe probe{r.b_at_t_star / (2.0 * r.a_at_t_star), r.t_star, e.vectors.col(0)};
    const double v = variational_form(reference_model(), reference_kernel(), lambda, rho, probe);
    EXPECT_NEAR(v, r.bound, 1e-12);
    EXPECT_NEAR(r.bound, r.p0 - lambda * lambda * r.sup_value, 1e-15);
    EXPECT_NEAR(r.sup_value, r.b_at_t_star * r.b_at_t_star / (4.0 * r.a_at_t_star), 1e-12 * r.sup_value);
}

TEST(Membership, PureStatesAreInUPrimeAndCentreIsNot) {
    const VariationalKernel vk(reference_model(), reference_kernel());
    for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 16.0;
        const auto r = vk.membership(bloch_to_density({std::cos(a), std::sin(a), 0.0}).matrix(), 0.5);
        EXPECT_TRUE(r.in_u_prime) << "angle index " << k;
        EXPECT_NEAR(r.p0, 0.0, 1e-15);
    }
    const auto centre = vk.membership(bloch_to_density({}).matrix(), 0.5);
    EXPECT_FALSE(centre.in_u_prime);
    EXPECT_TRUE(centre.degenerate_p0);
    EXPECT_NEAR(centre.bound, centre.p0 - 0.25 * centre.sup_value, 1e-15);
}

TEST(Membership, ZeroCouplingNeverInUPrimeForMixedStates) {
    const VariationalKernel vk(reference_model(), reference_kernel());
    const auto r = vk.membership(bloch_to_density({0.9, 0.0, 0.0}).matrix(), 0.0);
    EXPECT_FALSE(r.in_u_prime);
    EXPECT_DOUBLE_EQ(r.bound, r.p0);
}

TEST(Membership, ScanWindowDefaults) {
    const VariationalKernel vk(reference_model(), reference_kernel());
    EXPECT_NEAR(vk.scan_times().front(), 1e-3, 1e-15);
    EXPECT_NEAR(vk.scan_times().back(), 50.0, 1e-12);
    EXPECT_EQ(vk.scan_times().size(), 400u);
    VariationalOptions bad;
    bad.t_lo = 2.0;
    bad.t_max = 1.0;
    EXPECT_THROW(VariationalKernel(reference_model(), reference_kernel(), bad), std::invalid_argument);
}

TEST(NaturalState, FirstOrderFamilyUsesPinnedSign) {
    const auto nf =
        natural_state_first_order(reference_model(), reference_kernel(), 0.5, bloch_to_density({}).matrix());
    EXPECT_DOUBLE_EQ(nf.kappa, 1.0);
    EXPECT_EQ(nf.sign, kPinnedCorrelationSign);
}

TEST(RegionScan, DeterministicAcrossWorkerCounts) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    ScanSettings one;
    ScanSettings three;
    three.jobs = 3;
    const auto a = region_scan(g, {9, 0.0}, one);
    const auto b = region_scan(g, {9, 0.0}, three);
    EXPECT_EQ(region_csv(a), region_csv(b));
    EXPECT_GT(a.count_u_prime(), 0u);
}

TEST(RegionScan, CsvLayout) {
    const auto g = build_redfield_generator(reference_model(), reference_kernel(), 0.5);
    const auto r = region_scan(g, {3, 0.0}, ScanSettings{});
    const std::string csv = region_csv(r);
    EXPECT_EQ(csv.rfind("x,y,z,p0,bound,in_U_prime,in_N,min_eig,witness_t\n", 0), 0u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    // Corner points lie outside the ball and are omitted: 5 rows plus header.
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    const RegionPoint& centre = r.at(1, 1);
    EXPECT_FALSE(centre.in_u_prime);
    EXPECT_FALSE(centre.in_n);
    EXPECT_NE(csv.find("0,0,0,0.5,"), std::string::npos);
    EXPECT_THROW(region_scan(g, {1, 0.0}, ScanSettings{}), std::invalid_argument);
}

TEST(RegionScan, InclusionViolationsWithinOneCell) {
    RegionScanResult r;
    r.grid = {5, 0.0};
    r.points.resize(25);
    r.points[12].in_n = true;  // centre
    EXPECT_EQ(inclusion_violations(r).size(), 1u);
    r.points[18].in_u_prime = true;  // diagonal neighbour
    EXPECT_TRUE(inclusion_violations(r).empty());
    r.points[18].in_u_prime = false;
    r.points[24].in_u_prime = true;  // two cells away
    EXPECT_EQ(inclusion_violations(r).size(), 1u);
}

TEST(RadialDepth, ShrinksWithCoupling) {
    const VariationalKernel vk(reference_model(), reference_kernel());
    const auto strong = radial_depth(vk, 0.5, 0.0, 8);
    const auto weak = radial_depth(vk, 0.25, 0.0, 8);
    ASSERT_EQ(strong.depths.size(), 8u);
    EXPECT_GT(strong.max_depth, weak.max_depth);
    EXPECT_GT(weak.max_depth, 0.0);
    EXPECT_LT(strong.max_depth, 0.5);
}

}  // namespace
}  // namespace natcorr
