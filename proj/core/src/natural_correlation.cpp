// natural_correlation.cpp: closed-form A(t), B(t) and the U' supremum search.
//
// With X(t) = sum_j X_j e^{i w_j t} and C(tau) = sum_k c_k e^{-gamma_k tau} for
// tau > 0, splitting the square [0, t]^2 along its diagonal gives
//     A(t) = sum_{j,l} <phi0|X_j rho X_l|phi0> M_jl(t),
//     M_jl = sum_k c_k S(i(w_j + w_l), i w_l - gamma_k; t)
//          + conj(c_k) S(i(w_j + w_l), i w_j - conj(gamma_k); t),
// where S(z, w; t) integrates e^{z u + w v} over u, v >= 0, u + v <= t.

#include "natcorr/natural_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "natcorr/exp_integrals.hpp"

namespace natcorr {

namespace {

Complex checked_inverse(Complex z) {
    if (std::abs(z) < 1e-12) throw KernelIntegrabilityError("exact resonance between a bath term and a Bohr frequency");
    return 1.0 / z;
}

double default_t_lo(const SystemModel& model, const CorrelationKernel& kernel) {
    return 1e-3 * std::min(1.0 / model.max_bohr_frequency(), kernel.tau_r());
}

double default_t_max(const SystemModel& model, const CorrelationKernel& kernel) {
    return 50.0 * std::max(kernel.tau_r(), 1.0 / model.epsilon);
}

}  // namespace

VariationalKernel::VariationalKernel(const SystemModel& model, const CorrelationKernel& kernel,
                                     const VariationalOptions& options)
    : model_(model), kernel_(kernel), options_(options), components_(model.coupling_components()) {
    model_.validate();
    kernel_.require_limit("variational bound");
    for (const auto& c : components_) {
        const auto it = std::find_if(components_.begin(), components_.end(), [&](const BohrComponent& o) {
            return std::abs(o.frequency + c.frequency) <= 1e-9 * std::max(1.0, std::abs(c.frequency));
        });
        if (it == components_.end()) throw ConsistencyError("VariationalKernel: Bohr frequencies not closed under negation");
        negated_.push_back(static_cast<std::size_t>(it - components_.begin()));
    }
    const double t_lo = options.t_lo.value_or(default_t_lo(model, kernel));
    const double t_max = options.t_max.value_or(default_t_max(model, kernel));
    if (!(t_lo > 0.0) || !(t_max > t_lo) || options.scan_points < 2) {
        throw std::invalid_argument("VariationalKernel: need 0 < t_lo < t_max and at least two scan points");
    }
    const double ratio = std::log(t_max / t_lo) / static_cast<double>(options.scan_points - 1);
    times_.reserve(options.scan_points);
    table_.reserve(options.scan_points);
    for (std::size_t i = 0; i < options.scan_points; ++i) {
        const double t = i + 1 == options.scan_points ? t_max : t_lo * std::exp(ratio * static_cast<double>(i));
        times_.push_back(t);
        table_.push_back(at(t));
    }
}

VariationalKernel::Coefficients VariationalKernel::at(double t) const {
    if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("VariationalKernel: t must be finite and >= 0");
    const std::size_t n = components_.size();
    Coefficients c;
    c.k.assign(n * n, 0.0);
    c.kc.assign(n * n, 0.0);
    c.m.assign(n * n, 0.0);
    if (t == 0.0) return c;
    // Only the c_k halves are summed; the conjugate halves follow from
    //     Kc(a, b) = conj K(-a, -b),   second part of M(a, b) = conj first part of M(-b, -a).
    std::vector<Complex> half_m(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const Complex iwj(0.0, components_[j].frequency);
        for (std::size_t l = 0; l < n; ++l) {
            const Complex iwl(0.0, components_[l].frequency);
            Complex k = 0.0;
            Complex m = 0.0;
            for (const auto& term : kernel_.terms()) {
                const Complex a = term.amplitude;
                const Complex g = term.rate;
                k += a * exp_integral(iwj - g, t) * checked_inverse(g + iwl);
                m += a * simplex_exp_integral(iwj + iwl, iwl - g, t);
            }
            c.k[j * n + l] = k;
            half_m[j * n + l] = m;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) {
            c.kc[j * n + l] = std::conj(c.k[negated_[j] * n + negated_[l]]);
            c.m[j * n + l] = half_m[j * n + l] + std::conj(half_m[negated_[l] * n + negated_[j]]);
        }
    }
    return c;
}

VariationalKernel::Projection VariationalKernel::project(const ComplexMatrix& rho_s) const {
    const HermitianEigen eig = hermitian_eigendecomposition(rho_s);
    Projection p = project(rho_s, eig.vectors.col(0));
    p.p0 = eig.values(0);
    p.degenerate = eig.degenerate_lowest;
    return p;
}

VariationalKernel::Projection VariationalKernel::project(const ComplexMatrix& rho_s, const ComplexVector& phi0) const {
    if (rho_s.rows() != model_.dim() || phi0.size() != model_.dim()) {
        throw std::invalid_argument("VariationalKernel::project: dimension mismatch");
    }
    const std::size_t n = components_.size();
    Projection p;
    p.phi0 = phi0;
    p.p0 = (phi0.adjoint() * rho_s * phi0)(0).real();
    p.left.resize(n * n);
    p.right.resize(n * n);
    p.a.resize(n * n);
    const ComplexVector rho_phi = rho_s * phi0;
    const Eigen::RowVectorXcd phi_rho = phi0.adjoint() * rho_s;
    for (std::size_t j = 0; j < n; ++j) {
        const ComplexMatrix& xj = components_[j].op;
        for (std::size_t l = 0; l < n; ++l) {
            const ComplexMatrix& xl = components_[l].op;
            const Complex xjxl_rho = (phi0.adjoint() * xj * xl * rho_phi)(0);
            const Complex xl_rho_xj = (phi0.adjoint() * xl * rho_s * xj * phi0)(0);
            const Complex xj_rho_xl = (phi0.adjoint() * xj * rho_s * xl * phi0)(0);
            const Complex rho_xlxj = (phi_rho * xl * xj * phi0)(0);
            p.left[j * n + l] = xjxl_rho - xl_rho_xj;
            p.right[j * n + l] = xj_rho_xl - rho_xlxj;
            p.a[j * n + l] = xj_rho_xl;
        }
    }
    return p;
}

Complex VariationalKernel::a_value(const Projection& p, const Coefficients& c) {
    Complex a = 0.0;
    for (std::size_t i = 0; i < c.m.size(); ++i) a += p.a[i] * c.m[i];
    return a;
}

Complex VariationalKernel::b_value(const Projection& p, const Coefficients& c) {
    Complex b = 0.0;
    for (std::size_t i = 0; i < c.k.size(); ++i) b += c.k[i] * p.left[i] - c.kc[i] * p.right[i];
    return b;
}

VariationalResult VariationalKernel::membership(const ComplexMatrix& rho_s, double lambda) const {
    if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("membership: lambda must be >= 0");
    const Projection p = project(rho_s);
    VariationalResult r;
    r.p0 = p.p0;
    r.degenerate_p0 = p.degenerate;
    r.scan_points = times_.size();

    auto ratio = [&](const Coefficients& c, double* a_out, double* b_out) {
        const Complex a = a_value(p, c);
        const Complex b = b_value(p, c);
        if (a_out) *a_out = a.real();
        if (b_out) *b_out = b.real();
        if (a.real() < options_.a_floor) return -1.0;
        r.imag_residue = std::max(r.imag_residue, std::abs(a.imag()) / std::abs(a.real()));
        return b.real() * b.real() / (4.0 * a.real());
    };

    std::size_t best = times_.size();
    double best_value = -1.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double v = ratio(table_[i], nullptr, nullptr);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best == times_.size() || best_value <= 0.0) {
        r.sup_value = 0.0;
        r.bound = r.p0;
        r.in_u_prime = r.bound < 0.0;
        return r;
    }

    // Golden-section maximization in log t around the best coarse sample.
    double lo = std::log(times_[best == 0 ? 0 : best - 1]);
    double hi = std::log(times_[std::min(best + 1, times_.size() - 1)]);
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double s) { return ratio(at(std::exp(s)), nullptr, nullptr); };
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < options_.refine_iters && hi - lo > options_.refine_rel_width; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    double t_star = times_[best];
    double sup = best_value;
    if (std::max(fc, fd) > sup) {
        sup = std::max(fc, fd);
        t_star = std::exp(fc > fd ? c : d);
    }
    r.sup_value = sup;
    r.t_star = t_star;
    ratio(at(t_star), &r.a_at_t_star, &r.b_at_t_star);
    r.bound = r.p0 - lambda * lambda * sup;
    r.in_u_prime = r.bound < 0.0;
    return r;
}

double a_of_t(const SystemModel& model, const CorrelationKernel& kernel, const ComplexMatrix& rho_s, double t) {
    if (std::isnan(t) || t < 0.0) throw std::invalid_argument("a_of_t: t must be >= 0");
    VariationalOptions o;
    o.scan_points = 2;
    o.t_lo = 1.0;
    o.t_max = 2.0;
    const VariationalKernel vk(model, kernel, o);
    return VariationalKernel::a_value(vk.project(rho_s), vk.at(t)).real();
}

double b_of_t(const SystemModel& model, const CorrelationKernel& kernel, const ComplexMatrix& rho_s, double t) {
    if (std::isnan(t) || t < 0.0) throw std::invalid_argument("b_of_t: t must be >= 0");
    VariationalOptions o;
    o.scan_points = 2;
    o.t_lo = 1.0;
    o.t_max = 2.0;
    const VariationalKernel vk(model, kernel, o);
    return VariationalKernel::b_value(vk.project(rho_s), vk.at(t)).real();
}

double variational_form(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                        const ComplexMatrix& rho_s, const VariationalProbe& probe) {
    if (std::isnan(probe.t) || probe.t < 0.0) throw std::invalid_argument("variational_form: t must be >= 0");
    if (std::abs(probe.phi0.norm() - 1.0) > 1e-12) throw std::invalid_argument("variational_form: |phi0| must be 1");
    VariationalOptions o;
    o.scan_points = 2;
    o.t_lo = 1.0;
    o.t_max = 2.0;
    const VariationalKernel vk(model, kernel, o);
    const auto p = vk.project(rho_s, probe.phi0);
    const auto c = vk.at(probe.t);
    const double a = VariationalKernel::a_value(p, c).real();
    const double b = VariationalKernel::b_value(p, c).real();
    return p.p0 + lambda * lambda * (probe.xi * probe.xi * a - probe.xi * b);
}

VariationalResult u_prime_membership(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                                     const ComplexMatrix& rho_s, const VariationalOptions& options) {
    return VariationalKernel(model, kernel, options).membership(rho_s, lambda);
}

NaturalFamily natural_state_first_order(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                                        const ComplexMatrix& rho_s) {
    model.validate();
    kernel.require_limit("naturally correlated state");
    if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("natural state: lambda must be >= 0");
    DensityMatrix checked(rho_s);
    (void)checked;
    return NaturalFamily{1.0, kPinnedCorrelationSign};
}

}  // namespace natcorr
