// operators.hpp: small dense operator algebra, Bloch coordinates, vectorization
// and propagators shared by every other part of the library.
//
// Conventions (fixed project-wide):
//   * spin-1/2 operators have eigenvalues +-1/2, basis ordering {|up>, |down>},
//     so S^z = diag(1/2, -1/2) and S^+ = |up><down|.
//   * vectorization stacks columns: vec(A rho B) = (B^T kron A) vec(rho).
//   * Propagator(g) represents t -> exp(t g).

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace natcorr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

namespace spin {

ComplexMatrix identity();
ComplexMatrix sx();
ComplexMatrix sy();
ComplexMatrix sz();
ComplexMatrix splus();   // |up><down|
ComplexMatrix sminus();  // |down><up|

}  // namespace spin

/// ab - ba. Throws std::invalid_argument on a dimension mismatch.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest entrywise deviation of m from its adjoint.
double hermiticity_residual(const ComplexMatrix& m);

/// Trace norm distance (1/2)||a - b||_1 for Hermitian arguments.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // orthonormal columns, same order as values
    bool degenerate_lowest{false};  // lowest eigenvalue has multiplicity > 1
};

/// Spectral decomposition m = V diag(values) V^dagger.
///
/// Eigenvalues are returned in ascending order. Within a degenerate cluster the
/// basis is rebuilt by Gram-Schmidt from the projected standard basis vectors,
/// and every column is rotated so that its largest-magnitude component is real
/// and positive (the first such component on ties). The result is therefore a
/// function of m alone and not of solver internals.
HermitianEigen hermitian_eigendecomposition(const ComplexMatrix& m, double hermitian_tol = 1e-10);

/// Smallest eigenvalue of a Hermitian matrix (closed form for 2x2).
double min_eigenvalue(const ComplexMatrix& m);

struct BlochVector {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    double norm() const;
    /// x^2+y^2+z^2 <= 1 within tol.
    bool physical(double tol = 1e-12) const;
    /// Smallest eigenvalue (1 - |r|)/2 of the corresponding density matrix.
    double p0() const { return 0.5 * (1.0 - norm()); }
};

/// Hermitian unit-trace matrix. Positivity is deliberately not enforced; it is
/// queried with min_eigenvalue() because detecting its loss is part of the job.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m, double tol = 1e-12);

    const ComplexMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    double min_eigenvalue() const { return natcorr::min_eigenvalue(m_); }

private:
    ComplexMatrix m_;
};

DensityMatrix bloch_to_density(const BlochVector& v);
BlochVector density_to_bloch(const ComplexMatrix& rho);
inline BlochVector density_to_bloch(const DensityMatrix& rho) { return density_to_bloch(rho.matrix()); }

ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim);

/// Linear map on column-stacked vectorized d x d matrices.
class Superoperator {
public:
    Superoperator() = default;
    explicit Superoperator(Eigen::Index dim);
    Superoperator(Eigen::Index dim, ComplexMatrix matrix);

    static Superoperator identity(Eigen::Index dim);
    static Superoperator zero(Eigen::Index dim) { return Superoperator(dim); }

    Eigen::Index dim() const { return dim_; }
    const ComplexMatrix& matrix() const { return m_; }
    ComplexMatrix& matrix() { return m_; }

    ComplexVector apply(const ComplexVector& v) const { return m_ * v; }
    ComplexMatrix apply(const ComplexMatrix& rho) const { return unvec(m_ * vec(rho), dim_); }

    Superoperator& operator+=(const Superoperator& o);
    Superoperator& operator-=(const Superoperator& o);
    Superoperator& operator*=(Complex s);

    friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
    friend Superoperator operator-(Superoperator a, const Superoperator& b) { return a -= b; }
    friend Superoperator operator*(Complex s, Superoperator a) { return a *= s; }

    /// Largest singular value.
    double norm() const;

private:
    Eigen::Index dim_{0};
    ComplexMatrix m_;
};

/// rho -> left * rho * right.
Superoperator vectorize_superoperator(const ComplexMatrix& left, const ComplexMatrix& right);

/// rho -> [h, rho].
Superoperator commutator_superoperator(const ComplexMatrix& h);

/// exp(t g) for a fixed small generator g.
///
/// Uses a dense eigendecomposition when the eigenvector basis is well
/// conditioned and falls back to scaling-and-squaring otherwise.
class Propagator {
public:
    explicit Propagator(const Superoperator& g);

    ComplexMatrix matrix(double t) const;
    ComplexVector apply(double t, const ComplexVector& v) const;
    ComplexMatrix apply(double t, const ComplexMatrix& rho) const;

    const ComplexVector& eigenvalues() const { return eigenvalues_; }
    bool diagonalized() const { return diagonalized_; }
    Eigen::Index dim() const { return g_.dim(); }

private:
    Superoperator g_;
    bool diagonalized_{false};
    ComplexVector eigenvalues_;
    ComplexMatrix vectors_;
    ComplexMatrix inverse_;
};

/// exp(t g) v. Throws std::invalid_argument for non-finite t.
ComplexVector matrix_exponential_action(const Superoperator& g, double t, const ComplexVector& v);

}  // namespace natcorr
