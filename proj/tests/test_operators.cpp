// test_operators.cpp: spin algebra, vectorization, eigensolver and propagators.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "natcorr/operators.hpp"
#include "test_support.hpp"

namespace natcorr {
namespace {

using testing::max_abs;
using testing::random_matrix;

TEST(SpinOperators, SatisfyAngularMomentumAlgebra) {
    EXPECT_LT(max_abs(commutator(spin::sx(), spin::sy()) - kI * spin::sz()), 1e-15);
    EXPECT_LT(max_abs(commutator(spin::sz(), spin::splus()) - spin::splus()), 1e-15);
    EXPECT_LT(max_abs(spin::sx() - 0.5 * (spin::splus() + spin::sminus())), 1e-15);
    EXPECT_DOUBLE_EQ(spin::sz()(0, 0).real(), 0.5);
    EXPECT_DOUBLE_EQ(spin::splus()(0, 1).real(), 1.0);
}

TEST(Commutator, RejectsDimensionMismatch) {
    EXPECT_THROW(commutator(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST(Vectorization, StacksColumns) {
    std::mt19937 rng(1);
    const ComplexMatrix a = random_matrix(rng, 3);
    const ComplexMatrix b = random_matrix(rng, 3);
    const ComplexMatrix rho = random_matrix(rng, 3);
    const Superoperator s = vectorize_superoperator(a, b);
    EXPECT_LT(max_abs(s.apply(rho) - a * rho * b), 1e-12);
    EXPECT_LT(max_abs(unvec(vec(rho), 3) - rho), 0.0 + 1e-300);
    EXPECT_EQ(vec(rho)(1), rho(1, 0));
}

TEST(Vectorization, CommutatorSuperoperator) {
    std::mt19937 rng(2);
    const ComplexMatrix h = random_matrix(rng, 2);
    const ComplexMatrix rho = random_matrix(rng, 2);
    EXPECT_LT(max_abs(commutator_superoperator(h).apply(rho) - commutator(h, rho)), 1e-12);
}

TEST(HermitianEigen, AscendingAndReconstructs) {
    std::mt19937 rng(3);
    const ComplexMatrix m0 = random_matrix(rng, 4);
    const ComplexMatrix m = m0 + m0.adjoint();
    const HermitianEigen e = hermitian_eigendecomposition(m);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(max_abs(back - m), 1e-12);
    EXPECT_LT(max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(4, 4)), 1e-12);
}

TEST(HermitianEigen, DegenerateClusterIsDeterministic) {
    const HermitianEigen e = hermitian_eigendecomposition(ComplexMatrix::Identity(2, 2));
    EXPECT_TRUE(e.degenerate_lowest);
    EXPECT_LT(max_abs(e.vectors - ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(HermitianEigen, RejectsNonHermitian) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(hermitian_eigendecomposition(m), std::invalid_argument);
}

TEST(Bloch, RoundTripAndSmallestEigenvalue) {
    const BlochVector b{0.3, -0.2, 0.5};
    const DensityMatrix rho = bloch_to_density(b);
    const BlochVector back = density_to_bloch(rho);
    EXPECT_NEAR(back.x, b.x, 1e-15);
    EXPECT_NEAR(back.y, b.y, 1e-15);
    EXPECT_NEAR(back.z, b.z, 1e-15);
    EXPECT_NEAR(rho.min_eigenvalue(), b.p0(), 1e-15);
    EXPECT_TRUE(b.physical());
    EXPECT_FALSE((BlochVector{1.0, 1.0, 0.0}).physical());
}

TEST(Bloch, UpStateIsPositiveZ) {
    const DensityMatrix up = bloch_to_density({0.0, 0.0, 1.0});
    EXPECT_NEAR(up.matrix()(0, 0).real(), 1.0, 1e-15);
}

TEST(DensityMatrix, ValidatesTraceAndHermiticity) {
    EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2)), std::invalid_argument);
    ComplexMatrix m = 0.5 * ComplexMatrix::Identity(2, 2);
    m(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
}

TEST(TraceDistance, OrthogonalPureStatesAreOneApart) {
    const auto up = bloch_to_density({0, 0, 1}).matrix();
    const auto down = bloch_to_density({0, 0, -1}).matrix();
    EXPECT_NEAR(trace_distance(up, down), 1.0, 1e-15);
    const auto a = bloch_to_density({0.1, 0.2, 0.3}).matrix();
    const auto b = bloch_to_density({0.1, -0.2, 0.0}).matrix();
    EXPECT_NEAR(trace_distance(a, b), 0.5 * std::hypot(0.4, 0.3), 1e-15);
}

TEST(TraceDistance, LargerMatricesUseSpectrum) {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    ComplexMatrix b = ComplexMatrix::Zero(3, 3);
    a(0, 0) = 1.0;
    b(2, 2) = 1.0;
    EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-14);
}

TEST(Propagator, MatchesExponentialAction) {
    std::mt19937 rng(4);
    const Superoperator g(2, 0.3 * random_matrix(rng, 4));
    const Propagator p(g);
    const ComplexVector v = vec(random_matrix(rng, 2));
    for (double t : {0.0, 0.5, 3.0}) {
        EXPECT_LT((p.apply(t, v) - matrix_exponential_action(g, t, v)).norm(), 1e-10 * (1.0 + v.norm()));
    }
    EXPECT_LT(max_abs(p.matrix(0.0) - ComplexMatrix::Identity(4, 4)), 1e-12);
}

TEST(Propagator, SemigroupProperty) {
    std::mt19937 rng(5);
    const Superoperator g(2, 0.2 * random_matrix(rng, 4));
    const Propagator p(g);
    EXPECT_LT(max_abs(p.matrix(0.7) * p.matrix(1.1) - p.matrix(1.8)), 1e-10);
    EXPECT_THROW(p.matrix(std::nan("")), std::invalid_argument);
}

TEST(Superoperator, NormIsLargestSingularValue) {
    const Superoperator s = 2.0 * Superoperator::identity(2);
    EXPECT_NEAR(s.norm(), 2.0, 1e-14);
    EXPECT_THROW(Superoperator(2, ComplexMatrix::Identity(3, 3)), std::invalid_argument);
}

}  // namespace
}  // namespace natcorr
