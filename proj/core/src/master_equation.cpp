// master_equation.cpp: Redfield generator, TCL2 integration and positivity probe.

#include "natcorr/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace natcorr {

namespace {

void require_grid(std::span<const double> times, const char* context) {
    double previous = 0.0;
    for (double t : times) {
        if (!std::isfinite(t) || t < 0.0 || t < previous) {
            throw std::invalid_argument(std::string(context) + ": times must be finite, >= 0 and ascending");
        }
        previous = t;
    }
}

ComplexMatrix theta_from_components(const std::vector<BohrComponent>& components, Eigen::Index dim,
                                    const CorrelationKernel& kernel, double t) {
    ComplexMatrix theta = ComplexMatrix::Zero(dim, dim);
    for (const auto& c : components) theta += kernel.tail(-c.frequency, t) * c.op;
    return theta;
}

// Smallest eigenvalue of unvec(v) for a 2x2 Hermitian state, without allocation.
double min_eig_vec(const ComplexVector& v, Eigen::Index dim) {
    if (dim == 2) {
        const double a = v(0).real();
        const double d = v(3).real();
        const Complex b = 0.5 * (v(2) + std::conj(v(1)));
        return 0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(b));
    }
    const ComplexMatrix m = unvec(v, dim);
    return min_eigenvalue(0.5 * (m + m.adjoint()));
}

double trace_distance_vec(const ComplexVector& a, const ComplexVector& b, Eigen::Index dim) {
    if (dim == 2) {
        const ComplexVector d = a - b;
        const double half = 0.5 * (d(0).real() - d(3).real());
        const double mean = 0.5 * (d(0).real() + d(3).real());
        const double radius = std::hypot(half, std::abs(0.5 * (d(2) + std::conj(d(1)))));
        return 0.5 * (std::abs(mean + radius) + std::abs(mean - radius));
    }
    return trace_distance(unvec(a, dim), unvec(b, dim));
}

// Largest Re Gamma over the Bohr frequencies in either direction.
double max_rate(const RedfieldGenerator& g) {
    double rate = 0.0;
    for (const auto& c : g.model.coupling_components()) {
        for (double w : {c.frequency, -c.frequency}) {
            rate = std::max(rate, std::abs(g.kernel.half_fourier(w).real()));
        }
    }
    return rate;
}

}  // namespace

SystemModel SystemModel::spin_boson(double epsilon) {
    SystemModel m;
    m.epsilon = epsilon;
    m.hamiltonian = epsilon * spin::sz();
    m.coupling = spin::sx();
    m.validate();
    return m;
}

void SystemModel::validate() const {
    if (!std::isfinite(epsilon) || epsilon <= 0.0) {
        throw std::invalid_argument("SystemModel: epsilon must be finite and > 0");
    }
    if (hamiltonian.rows() != hamiltonian.cols() || coupling.rows() != coupling.cols() ||
        hamiltonian.rows() != coupling.rows() || hamiltonian.rows() == 0) {
        throw std::invalid_argument("SystemModel: H_S and X must be square and of equal dimension");
    }
    if (hermiticity_residual(hamiltonian) > 1e-12 || hermiticity_residual(coupling) > 1e-12) {
        throw std::invalid_argument("SystemModel: H_S and X must be Hermitian");
    }
}

std::vector<BohrComponent> SystemModel::coupling_components() const {
    const HermitianEigen eig = hermitian_eigendecomposition(hamiltonian);
    const Eigen::Index d = dim();
    const ComplexMatrix xe = eig.vectors.adjoint() * coupling * eig.vectors;
    const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    std::vector<BohrComponent> out;
    for (Eigen::Index m = 0; m < d; ++m) {
        for (Eigen::Index n = 0; n < d; ++n) {
            if (std::abs(xe(m, n)) < 1e-15) continue;
            const double w = eig.values(m) - eig.values(n);
            auto it = std::find_if(out.begin(), out.end(),
                                   [&](const BohrComponent& c) { return std::abs(c.frequency - w) <= 1e-9 * scale; });
            if (it == out.end()) {
                out.push_back({w, ComplexMatrix::Zero(d, d)});
                it = out.end() - 1;
            }
            it->op += xe(m, n) * eig.vectors.col(m) * eig.vectors.col(n).adjoint();
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
    return out;
}

double SystemModel::max_bohr_frequency() const {
    double w = 0.0;
    for (const auto& c : coupling_components()) w = std::max(w, std::abs(c.frequency));
    return std::max(w, 1e-12);
}

ComplexMatrix theta_operator(const SystemModel& model, const CorrelationKernel& kernel, double t) {
    return theta_from_components(model.coupling_components(), model.dim(), kernel, t);
}

Superoperator relaxation_superoperator(const ComplexMatrix& x, const ComplexMatrix& theta, double scale) {
    const Eigen::Index d = x.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix theta_dag = theta.adjoint();
    Superoperator s = vectorize_superoperator(x * theta, id);
    s -= vectorize_superoperator(theta, x);
    s -= vectorize_superoperator(x, theta_dag);
    s += vectorize_superoperator(id, theta_dag * x);
    s *= Complex(scale, 0.0);
    return s;
}

RedfieldGenerator build_redfield_generator(const SystemModel& model, const CorrelationKernel& kernel,
                                           double lambda) {
    model.validate();
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw std::invalid_argument("build_redfield_generator: lambda must be finite and >= 0");
    }
    kernel.require_limit("Redfield generator Lambda_0");
    RedfieldGenerator g;
    g.model = model;
    g.kernel = kernel;
    g.lambda = lambda;
    g.theta = theta_operator(model, kernel, 0.0);
    g.lambda0 = relaxation_superoperator(model.coupling, g.theta, lambda * lambda);
    g.liouvillian = Complex(0.0, -1.0) * commutator_superoperator(model.hamiltonian) - g.lambda0;
    return g;
}

Superoperator build_lambda_t(const RedfieldGenerator& g, double t) {
    if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("build_lambda_t: t must be finite and >= 0");
    if (t == 0.0) return g.lambda0;
    return relaxation_superoperator(g.model.coupling, theta_operator(g.model, g.kernel, t), g.lambda * g.lambda);
}

Trajectory propagate_markovian(const RedfieldGenerator& g, const DensityMatrix& rho0,
                               std::span<const double> times) {
    require_grid(times, "propagate_markovian");
    const Propagator p(g.liouvillian);
    const ComplexVector v0 = vec(rho0.matrix());
    Trajectory out;
    for (double t : times) {
        ComplexMatrix rho = unvec(p.apply(t, v0), rho0.dim());
        out.times.push_back(t);
        out.min_eigenvalues.push_back(min_eigenvalue(0.5 * (rho + rho.adjoint())));
        out.states.push_back(std::move(rho));
    }
    return out;
}

namespace {

// Integrating-factor (Lawson) fourth-order Runge-Kutta for
//     dy/dt = G y + N(t, y)
// with the linear part G propagated exactly.
template <class Nonlinear>
std::vector<ComplexVector> lawson_rk4(const Propagator& linear, const ComplexVector& y0,
                                      std::span<const double> times, double h_max, Nonlinear&& n) {
    std::vector<ComplexVector> out;
    out.reserve(times.size());
    ComplexVector y = y0;
    double t = 0.0;
    double cached_h = -1.0;
    ComplexMatrix p_full;
    ComplexMatrix p_half;
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / h_max - 1e-12));
            const double h = span / static_cast<double>(std::max(1L, steps));
            if (h != cached_h) {
                p_full = linear.matrix(h);
                p_half = linear.matrix(0.5 * h);
                cached_h = h;
            }
            for (long k = 0; k < std::max(1L, steps); ++k) {
                const ComplexVector a1 = n(t, y);
                const ComplexVector py_half = p_half * y;
                const ComplexVector pa1_half = p_half * a1;
                const ComplexVector b2 = n(t + 0.5 * h, py_half + 0.5 * h * pa1_half);
                const ComplexVector b3 = n(t + 0.5 * h, py_half + 0.5 * h * b2);
                const ComplexVector b4 = n(t + h, p_full * y + h * (p_half * b3));
                y = p_full * y + (h / 6.0) * (p_full * a1 + 2.0 * (p_half * (b2 + b3)) + b4);
                t += h;
            }
            t = target;
        }
        out.push_back(y);
    }
    return out;
}

}  // namespace

Trajectory propagate_tcl2(const RedfieldGenerator& g, const DensityMatrix& rho0, std::span<const double> times,
                          double kappa, const Tcl2Options& options) {
    require_grid(times, "propagate_tcl2");
    if (!std::isfinite(kappa)) throw std::invalid_argument("propagate_tcl2: kappa must be finite");
    if (options.correlation_sign != 1 && options.correlation_sign != -1) {
        throw std::invalid_argument("propagate_tcl2: correlation_sign must be +1 or -1");
    }
    const Eigen::Index d = rho0.dim();
    const auto components = g.model.coupling_components();
    const double scale = g.lambda * g.lambda;
    const ComplexVector v0 = vec(rho0.matrix());
    const Superoperator free_gen = Complex(0.0, -1.0) * commutator_superoperator(g.model.hamiltonian);
    const Propagator free_prop(free_gen);
    const double source = options.correlation_sign * kappa;

    auto lambda_t = [&](double t) {
        return relaxation_superoperator(g.model.coupling, theta_from_components(components, d, g.kernel, t), scale);
    };

    const bool resummed = options.expansion == Expansion::Resummed;
    const Propagator linear(resummed ? g.liouvillian : free_gen);
    auto nonlinear = [&](double t, const ComplexVector& y) -> ComplexVector {
        const Superoperator lt = lambda_t(t);
        const ComplexVector free_state = free_prop.apply(t, v0);
        ComplexVector r = source * lt.apply(free_state);
        if (resummed) {
            r += lt.apply(y);
        } else {
            r += lt.apply(free_state) - g.lambda0.apply(free_state);
        }
        return r;
    };

    double h = std::min(1.0 / g.model.max_bohr_frequency(), g.kernel.tau_r()) / 40.0;
    const ComplexVector y0 = resummed ? v0 : ComplexVector(ComplexVector::Zero(v0.size()));
    std::vector<ComplexVector> coarse = lawson_rk4(linear, y0, times, h, nonlinear);
    for (int k = 0; k < options.max_halvings; ++k) {
        h *= 0.5;
        std::vector<ComplexVector> fine = lawson_rk4(linear, y0, times, h, nonlinear);
        double diff = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, (fine[i] - coarse[i]).cwiseAbs().maxCoeff());
        coarse = std::move(fine);
        if (diff < options.step_tolerance) break;
    }

    Trajectory out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        ComplexVector v = coarse[i];
        if (!resummed) v += free_prop.apply(times[i], v0);
        ComplexMatrix rho = unvec(v, d);
        out.times.push_back(times[i]);
        out.min_eigenvalues.push_back(min_eigenvalue(0.5 * (rho + rho.adjoint())));
        out.states.push_back(std::move(rho));
    }
    return out;
}

StationaryState stationary_state(const RedfieldGenerator& g) {
    const ComplexMatrix& l = g.liouvillian.matrix();
    const Eigen::Index n = l.rows();
    const Eigen::Index d = g.liouvillian.dim();
    const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());

    StationaryState out;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(l, false);
    int zeros = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(es.eigenvalues()(i)) < 1e-10 * scale) ++zeros;
    }
    out.degenerate = zeros > 1;

    // L v = 0 together with Tr v = 1.
    ComplexMatrix a(n + 1, n);
    a.topRows(n) = l;
    a.row(n).setZero();
    for (Eigen::Index i = 0; i < d; ++i) a(n, i * d + i) = 1.0;
    ComplexVector rhs = ComplexVector::Zero(n + 1);
    rhs(n) = 1.0;
    const ComplexVector v = a.colPivHouseholderQr().solve(rhs);
    ComplexMatrix rho = unvec(v, d);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    out.residual = (l * vec(rho)).norm();
    out.state = std::move(rho);
    return out;
}

PositivityProbe::PositivityProbe(const RedfieldGenerator& g, const PositivityOptions& options)
    : options_(options), propagator_(g.liouvillian), dim_(g.liouvillian.dim()) {
    const double w = g.model.max_bohr_frequency();
    step_ = options.step.value_or(std::min(1.0 / w, g.kernel.tau_r()) / 16.0);
    if (!(step_ > 0.0) || !std::isfinite(step_)) throw std::invalid_argument("PositivityProbe: step must be > 0");
    if (options.t_cap) {
        t_cap_ = *options.t_cap;
    } else {
        const double rate = g.lambda * g.lambda * max_rate(g);
        t_cap_ = rate > 0.0 ? 50.0 / rate : 100.0 / w;
    }
    if (!(t_cap_ > 0.0) || !std::isfinite(t_cap_)) throw std::invalid_argument("PositivityProbe: t_cap must be > 0");
    // Coarse samples miss the bottom of a dip by at most ~(w step)^2 of its depth.
    margin_ = std::max(1e-3, (w * step_) * (w * step_));
    grid_maps_.push_back(propagator_.matrix(step_));
    const StationaryState ss = stationary_state(g);
    stationary_ = ss.state;
}

double PositivityProbe::min_eig_at(const ComplexVector& v0, double t) const {
    return min_eig_vec(propagator_.apply(t, v0), dim_);
}

NMembership PositivityProbe::evaluate(const ComplexMatrix& rho0) const {
    const ComplexVector v0 = vec(rho0);
    const ComplexVector vss = vec(stationary_);
    const ComplexMatrix& p = grid_maps_.front();
    const auto n_steps = static_cast<long>(std::ceil(t_cap_ / step_));

    NMembership out;
    out.min_eigenvalue_attained = min_eig_vec(v0, dim_);
    out.argmin_time = 0.0;
    out.truncated = true;

    auto consider = [&](double t, double value) {
        if (value < out.min_eigenvalue_attained) {
            out.min_eigenvalue_attained = value;
            out.argmin_time = t;
        }
        if (value < -options_.pos_tol && (!out.witness_time || t < *out.witness_time)) out.witness_time = t;
    };

    // Golden-section refinement of a bracketed dip.
    auto refine = [&](double a, double b) {
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - inv_phi * (b - a);
        double e = a + inv_phi * (b - a);
        double fc = min_eig_at(v0, c);
        double fe = min_eig_at(v0, e);
        for (int it = 0; it < options_.refine_iterations && b - a > 1e-12 * std::max(1.0, b); ++it) {
            if (fc < fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - inv_phi * (b - a);
                fc = min_eig_at(v0, c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + inv_phi * (b - a);
                fe = min_eig_at(v0, e);
            }
        }
        if (fc < fe) {
            consider(c, fc);
        } else {
            consider(e, fe);
        }
    };

    ComplexVector v = v0;
    double f_prev2 = std::numeric_limits<double>::infinity();
    double f_prev = out.min_eigenvalue_attained;
    consider(0.0, f_prev);
    for (long k = 1; k <= n_steps; ++k) {
        v = p * v;
        const double t = static_cast<double>(k) * step_;
        const double f = min_eig_vec(v, dim_);
        consider(t, f);
        // Local minimum at k - 1 (or a decreasing start at k = 1).
        if (f_prev <= f && f_prev <= f_prev2 && f_prev < options_.pos_tol + margin_) {
            refine(std::max(0.0, t - 2.0 * step_), t);
        }
        f_prev2 = f_prev;
        f_prev = f;
        if (trace_distance_vec(v, vss, dim_) < options_.convergence_tol) {
            out.truncated = false;
            break;
        }
    }
    out.in_n = out.witness_time.has_value();
    return out;
}

NMembership n_membership(const RedfieldGenerator& g, const DensityMatrix& rho0, const PositivityOptions& options) {
    return PositivityProbe(g, options).evaluate(rho0.matrix());
}

}  // namespace natcorr
