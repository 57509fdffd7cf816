// operators.cpp: dense operator algebra and propagators.

#include "natcorr/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace natcorr {

namespace spin {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix sx() {
    ComplexMatrix m(2, 2);
    m << 0.0, 0.5,
         0.5, 0.0;
    return m;
}

ComplexMatrix sy() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -0.5),
         Complex(0.0, 0.5), 0.0;
    return m;
}

ComplexMatrix sz() {
    ComplexMatrix m(2, 2);
    m << 0.5, 0.0,
         0.0, -0.5;
    return m;
}

ComplexMatrix splus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

ComplexMatrix sminus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

}  // namespace spin

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    require_square(a, what);
    require_square(b, what);
    if (a.rows() != b.rows()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
    }
}

// Rotate the column so its largest-magnitude entry is real positive.
void fix_phase(Eigen::Ref<ComplexVector> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_abs * (1.0 + 1e-12)) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0.0) {
        v *= std::conj(v(best)) / best_abs;
    }
}

}  // namespace

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

double hermiticity_residual(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "trace_distance");
    const ComplexMatrix d = 0.5 * ((a - b) + (a - b).adjoint());
    if (d.rows() == 2) {
        const double mean = 0.5 * (d(0, 0).real() + d(1, 1).real());
        const double half = 0.5 * (d(0, 0).real() - d(1, 1).real());
        const double radius = std::hypot(half, std::abs(d(0, 1)));
        return 0.5 * (std::abs(mean + radius) + std::abs(mean - radius));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

HermitianEigen hermitian_eigendecomposition(const ComplexMatrix& m, double hermitian_tol) {
    require_square(m, "hermitian_eigendecomposition");
    if (!m.allFinite()) {
        throw std::invalid_argument("hermitian_eigendecomposition: non-finite entries");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermiticity_residual(m) > hermitian_tol * scale) {
        throw std::invalid_argument("hermitian_eigendecomposition: matrix is not Hermitian");
    }
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigendecomposition: solver failed");
    }

    HermitianEigen out;
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    const Eigen::Index n = h.rows();
    const double cluster_tol = 1e-10 * scale;

    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && out.values(end) - out.values(end - 1) <= cluster_tol) {
            ++end;
        }
        const Eigen::Index size = end - start;
        if (start == 0) {
            out.degenerate_lowest = size > 1;
        }
        if (size > 1) {
            // Canonical basis of the degenerate subspace.
            const ComplexMatrix basis = out.vectors.middleCols(start, size);
            const ComplexMatrix projector = basis * basis.adjoint();
            ComplexMatrix rebuilt(n, size);
            Eigen::Index filled = 0;
            for (Eigen::Index e = 0; e < n && filled < size; ++e) {
                ComplexVector cand = projector.col(e);
                for (Eigen::Index k = 0; k < filled; ++k) {
                    cand -= rebuilt.col(k) * rebuilt.col(k).dot(cand);
                }
                const double nrm = cand.norm();
                if (nrm > 1e-6) {
                    rebuilt.col(filled++) = cand / nrm;
                }
            }
            if (filled == size) {
                out.vectors.middleCols(start, size) = rebuilt;
            }
        }
        start = end;
    }
    for (Eigen::Index c = 0; c < n; ++c) {
        fix_phase(out.vectors.col(c));
    }
    return out;
}

double min_eigenvalue(const ComplexMatrix& m) {
    require_square(m, "min_eigenvalue");
    if (m.rows() == 2) {
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
        const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
        return 0.5 * (a + d) - half_gap;
    }
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

bool BlochVector::physical(double tol) const { return x * x + y * y + z * z <= 1.0 + tol; }

DensityMatrix::DensityMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
    require_square(m_, "DensityMatrix");
    if (!m_.allFinite()) {
        throw std::invalid_argument("DensityMatrix: non-finite entries");
    }
    if (hermiticity_residual(m_) > tol) {
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(m_.trace() - 1.0) > tol) {
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    }
}

DensityMatrix bloch_to_density(const BlochVector& v) {
    ComplexMatrix m(2, 2);
    m << 0.5 + 0.5 * v.z, Complex(0.5 * v.x, -0.5 * v.y),
         Complex(0.5 * v.x, 0.5 * v.y), 0.5 - 0.5 * v.z;
    return DensityMatrix(std::move(m));
}

BlochVector density_to_bloch(const ComplexMatrix& rho) {
    if (rho.rows() != 2 || rho.cols() != 2) {
        throw std::invalid_argument("density_to_bloch: Bloch coordinates need a 2x2 matrix");
    }
    // x = 2 Tr(rho S^x) etc.
    const Complex c = rho(1, 0) + std::conj(rho(0, 1));
    return BlochVector{c.real(), c.imag(), (rho(0, 0) - rho(1, 1)).real()};
}

ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim) {
    if (v.size() != dim * dim) {
        throw std::invalid_argument("unvec: vector length is not dim^2");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

Superoperator::Superoperator(Eigen::Index dim)
    : dim_(dim), m_(ComplexMatrix::Zero(dim * dim, dim * dim)) {}

Superoperator::Superoperator(Eigen::Index dim, ComplexMatrix matrix) : dim_(dim), m_(std::move(matrix)) {
    if (m_.rows() != dim * dim || m_.cols() != dim * dim) {
        throw std::invalid_argument("Superoperator: matrix must be dim^2 x dim^2");
    }
}

Superoperator Superoperator::identity(Eigen::Index dim) {
    return Superoperator(dim, ComplexMatrix::Identity(dim * dim, dim * dim));
}

Superoperator& Superoperator::operator+=(const Superoperator& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("Superoperator: dimension mismatch");
    m_ += o.m_;
    return *this;
}

Superoperator& Superoperator::operator-=(const Superoperator& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("Superoperator: dimension mismatch");
    m_ -= o.m_;
    return *this;
}

Superoperator& Superoperator::operator*=(Complex s) {
    m_ *= s;
    return *this;
}

double Superoperator::norm() const {
    if (m_.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m_);
    return svd.singularValues()(0);
}

Superoperator vectorize_superoperator(const ComplexMatrix& left, const ComplexMatrix& right) {
    require_same_dim(left, right, "vectorize_superoperator");
    return Superoperator(left.rows(), Eigen::kroneckerProduct(right.transpose(), left).eval());
}

Superoperator commutator_superoperator(const ComplexMatrix& h) {
    require_square(h, "commutator_superoperator");
    const ComplexMatrix id = ComplexMatrix::Identity(h.rows(), h.cols());
    return vectorize_superoperator(h, id) - vectorize_superoperator(id, h);
}

Propagator::Propagator(const Superoperator& g) : g_(g) {
    if (!g.matrix().allFinite()) {
        throw std::invalid_argument("Propagator: non-finite generator");
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> es(g.matrix());
    if (es.info() != Eigen::Success) return;
    const ComplexMatrix v = es.eigenvectors();
    Eigen::PartialPivLU<ComplexMatrix> lu(v);
    const ComplexMatrix vinv = lu.inverse();
    if (!vinv.allFinite()) return;
    const double cond = v.cwiseAbs().rowwise().sum().maxCoeff() * vinv.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(cond < 1e6)) return;
    // Reconstruction guard against defective generators.
    const ComplexMatrix rec = v * es.eigenvalues().asDiagonal() * vinv;
    const double scale = std::max(1.0, g.matrix().cwiseAbs().maxCoeff());
    if ((rec - g.matrix()).cwiseAbs().maxCoeff() > 1e-12 * scale * cond) return;
    eigenvalues_ = es.eigenvalues();
    vectors_ = v;
    inverse_ = vinv;
    diagonalized_ = true;
}

ComplexMatrix Propagator::matrix(double t) const {
    if (!std::isfinite(t)) {
        throw std::invalid_argument("Propagator: non-finite time");
    }
    if (t == 0.0) {
        return ComplexMatrix::Identity(g_.matrix().rows(), g_.matrix().cols());
    }
    if (diagonalized_) {
        const ComplexVector e = (eigenvalues_ * t).array().exp().matrix();
        return vectors_ * e.asDiagonal() * inverse_;
    }
    const ComplexMatrix scaled = g_.matrix() * t;
    return scaled.exp();
}

ComplexVector Propagator::apply(double t, const ComplexVector& v) const {
    if (!std::isfinite(t)) {
        throw std::invalid_argument("Propagator: non-finite time");
    }
    if (t == 0.0) return v;
    if (diagonalized_) {
        const ComplexVector e = (eigenvalues_ * t).array().exp().matrix();
        return vectors_ * (e.asDiagonal() * (inverse_ * v));
    }
    return matrix(t) * v;
}

ComplexMatrix Propagator::apply(double t, const ComplexMatrix& rho) const {
    return unvec(apply(t, vec(rho)), g_.dim());
}

ComplexVector matrix_exponential_action(const Superoperator& g, double t, const ComplexVector& v) {
    if (!std::isfinite(t)) {
        throw std::invalid_argument("matrix_exponential_action: non-finite time");
    }
    return Propagator(g).apply(t, v);
}

}  // namespace natcorr
