// corrections.cpp: closed-form delta_rho1, delta_rho2 and the perturbative solution.
//
// With X(t) = sum_j X_j e^{i w_j t} and C(t) = sum_k c_k e^{-gamma_k t},
//     delta_rho1[t] / lambda^2 = sum_{j,l} K(w_j, w_l; t) [X_j, X_l rho]
//                              - Kc(w_j, w_l; t) [X_j, rho X_l],
//     K(a, b; t)  = sum_k c_k int_0^t e^{(i a - gamma_k) s} ds / (gamma_k + i b),
// and Kc the same with c_k, gamma_k conjugated.

#include "natcorr/corrections.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "natcorr/exp_integrals.hpp"

namespace natcorr {

namespace {

Complex integral_to(Complex z, double t) {
    if (std::isinf(t)) {
        if (std::abs(z) < 1e-12) {
            throw KernelIntegrabilityError("exact resonance in an infinite-time integral");
        }
        return -1.0 / z;
    }
    return exp_integral(z, t);
}

Complex checked_inverse(Complex z) {
    if (std::abs(z) < 1e-12) throw KernelIntegrabilityError("exact resonance between a bath term and a Bohr frequency");
    return 1.0 / z;
}

struct Delta1 {
    Superoperator map;
    double magnitude{0.0};  // sum of |coefficient| * ||term|| before cancellation
};

Delta1 delta1_map(const SystemModel& model, const CorrelationKernel& kernel, double lambda, double t) {
    model.validate();
    if (std::isnan(t) || t < 0.0) throw std::invalid_argument("delta_rho1: t must be >= 0 or infinite");
    if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("delta_rho1: lambda must be >= 0");
    if (std::isinf(t)) kernel.require_limit("delta_rho1[inf]");
    const Eigen::Index d = model.dim();
    Delta1 out{Superoperator::zero(d), 0.0};
    if (t == 0.0 || lambda == 0.0) return out;
    kernel.require_limit("delta_rho1");

    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const auto components = model.coupling_components();
    for (const auto& xj : components) {
        for (const auto& xl : components) {
            Complex k = 0.0;
            Complex kc = 0.0;
            for (const auto& term : kernel.terms()) {
                const Complex c = term.amplitude;
                const Complex g = term.rate;
                k += c * integral_to(Complex(0.0, xj.frequency) - g, t) * checked_inverse(g + Complex(0.0, xl.frequency));
                kc += std::conj(c) * integral_to(Complex(0.0, xj.frequency) - std::conj(g), t) *
                      checked_inverse(std::conj(g) + Complex(0.0, xl.frequency));
            }
            // [X_j, X_l rho] and [X_j, rho X_l] as superoperators.
            const Superoperator left = vectorize_superoperator(xj.op * xl.op, id) - vectorize_superoperator(xl.op, xj.op);
            const Superoperator right = vectorize_superoperator(xj.op, xl.op) - vectorize_superoperator(id, xl.op * xj.op);
            out.map += k * left;
            out.map -= kc * right;
            out.magnitude += std::abs(k) * left.norm() + std::abs(kc) * right.norm();
        }
    }
    const double scale = lambda * lambda;
    out.map *= Complex(scale, 0.0);
    out.magnitude *= scale;
    return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

double correlated_factor(const InitialCorrelation& correlation) {
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ProductCorrelation>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, NaturalFamily>) {
                if (c.sign != 1 && c.sign != -1) throw std::invalid_argument("NaturalFamily: sign must be +1 or -1");
                if (!std::isfinite(c.kappa)) throw std::invalid_argument("NaturalFamily: kappa must be finite");
                return c.sign * c.kappa;
            } else {
                throw std::invalid_argument("delta_rho2: explicit oracle state '" + c.label +
                                            "' must be evaluated by the exact oracle");
            }
        },
        correlation);
}

nlohmann::json matrix_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Superoperator delta_rho1_superoperator(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                                       double t) {
    return delta1_map(model, kernel, lambda, t).map;
}

ComplexMatrix delta_rho1(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                         const ComplexMatrix& rho_s, double t) {
    return hermitian_part(delta_rho1_superoperator(model, kernel, lambda, t).apply(rho_s));
}

ComplexMatrix delta_rho2(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                         const ComplexMatrix& rho_s, const InitialCorrelation& correlation, double t) {
    const double factor = correlated_factor(correlation);
    if (factor == 0.0) return ComplexMatrix::Zero(rho_s.rows(), rho_s.cols());
    return factor * delta_rho1(model, kernel, lambda, rho_s, t);
}

CorrectionReport slipped_initial_condition(const SystemModel& model, const CorrelationKernel& kernel,
                                           double lambda, const DensityMatrix& rho_s,
                                           const InitialCorrelation& correlation) {
    kernel.require_limit("slipped initial condition");
    const double factor = correlated_factor(correlation);
    const Delta1 d1 = delta1_map(model, kernel, lambda, kInfiniteHorizon);
    CorrectionReport r;
    r.rho_s = rho_s.matrix();
    r.delta_rho1 = hermitian_part(d1.map.apply(rho_s.matrix()));
    r.delta_rho2 = factor == 0.0 ? ComplexMatrix::Zero(rho_s.dim(), rho_s.dim()) : ComplexMatrix(factor * r.delta_rho1);
    r.slipped_initial = r.rho_s + r.delta_rho1 + r.delta_rho2;
    if (const auto* nf = std::get_if<NaturalFamily>(&correlation)) r.kappa = nf->kappa;
    r.quadrature_error_estimate = 16.0 * DBL_EPSILON * d1.magnitude * (1.0 + std::abs(factor));
    return r;
}

std::string correction_report_json(const CorrectionReport& r) {
    nlohmann::json j;
    j["rho_s"] = matrix_json(r.rho_s);
    j["delta1"] = matrix_json(r.delta_rho1);
    j["delta2"] = matrix_json(r.delta_rho2);
    j["slipped"] = matrix_json(r.slipped_initial);
    j["kappa"] = r.kappa;
    j["err_est"] = r.quadrature_error_estimate;
    j["correlation_sign"] = kPinnedCorrelationSign;
    return j.dump(2);
}

Superoperator free_average(const Superoperator& s, const ComplexMatrix& hamiltonian, double t) {
    const Eigen::Index d = hamiltonian.rows();
    if (s.dim() != d) throw std::invalid_argument("free_average: dimension mismatch");
    const HermitianEigen eig = hermitian_eigendecomposition(hamiltonian);
    const ComplexMatrix& v = eig.vectors;
    // vec(V^dagger rho V) = w vec(rho); w is unitary.
    const ComplexMatrix w = vectorize_superoperator(v.adjoint(), v).matrix();
    ComplexMatrix se = w * s.matrix() * w.adjoint();
    auto nu = [&](Eigen::Index p) { return eig.values(p % d) - eig.values(p / d); };
    for (Eigen::Index p = 0; p < d * d; ++p) {
        for (Eigen::Index q = 0; q < d * d; ++q) se(p, q) *= integral_to(Complex(0.0, nu(p) - nu(q)), t);
    }
    return Superoperator(d, w.adjoint() * se * w);
}

Trajectory perturbative_solution(const RedfieldGenerator& g, const DensityMatrix& rho_s,
                                 const InitialCorrelation& correlation, std::span<const double> times,
                                 Expansion expansion) {
    const double factor = correlated_factor(correlation);
    const Propagator markov(g.liouvillian);
    const Propagator free_prop(Complex(0.0, -1.0) * commutator_superoperator(g.model.hamiltonian));
    double previous = 0.0;
    Trajectory out;
    for (double t : times) {
        if (!std::isfinite(t) || t < previous) {
            throw std::invalid_argument("perturbative_solution: times must be finite, >= 0 and ascending");
        }
        previous = t;
        const ComplexMatrix d1 = delta_rho1(g.model, g.kernel, g.lambda, rho_s.matrix(), t);
        ComplexMatrix inner = rho_s.matrix() + (1.0 + factor) * d1;
        ComplexMatrix rho;
        if (expansion == Expansion::Resummed) {
            rho = markov.apply(t, inner);
        } else {
            inner -= free_average(g.lambda0, g.model.hamiltonian, t).apply(rho_s.matrix());
            rho = free_prop.apply(t, inner);
        }
        rho = hermitian_part(rho);
        out.times.push_back(t);
        out.min_eigenvalues.push_back(min_eigenvalue(rho));
        out.states.push_back(std::move(rho));
    }
    return out;
}

}  // namespace natcorr
