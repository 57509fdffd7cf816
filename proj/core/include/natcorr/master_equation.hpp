// master_equation.hpp: second-order (Redfield) generator, its finite-memory
// correction Lambda_t, Markovian and time-local (TCL2) propagation, stationary
// states and detection of positivity loss under Markovian evolution.
//
// Sign conventions: the Markovian equation reads d rho/dt = L rho with
//     L = -i[H_S, .] - Lambda_0,
//     Lambda_t rho = lambda^2 ([X, Theta_t rho] - [X, rho Theta_t^dagger]),
//     Theta_t      = int_t^inf C(s) X(-s) ds,   X(t) = e^{i H_S t} X e^{-i H_S t}.
// With H_S = eps S^z the free evolution rotates the Bloch vector
// counter-clockwise about z: (x, y) -> (x cos eps t - y sin eps t,
//                                       x sin eps t + y cos eps t).

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "natcorr/bath.hpp"
#include "natcorr/conventions.hpp"
#include "natcorr/operators.hpp"

namespace natcorr {

/// X(t) = sum_j op_j e^{i frequency_j t}.
struct BohrComponent {
    double frequency{0.0};
    ComplexMatrix op;
};

struct SystemModel {
    double epsilon{1.0};
    ComplexMatrix hamiltonian;
    ComplexMatrix coupling;

    /// H_S = eps S^z, X = S^x.
    static SystemModel spin_boson(double epsilon);

    Eigen::Index dim() const { return hamiltonian.rows(); }
    void validate() const;
    std::vector<BohrComponent> coupling_components() const;
    /// Fastest Bohr frequency (at least a tiny positive floor).
    double max_bohr_frequency() const;
};

struct RedfieldGenerator {
    SystemModel model;
    CorrelationKernel kernel;
    double lambda{0.0};
    ComplexMatrix theta;        // Theta_0
    Superoperator lambda0;      // Lambda_0
    Superoperator liouvillian;  // -i[H_S, .] - Lambda_0
};

/// Theta_t = int_t^inf C(s) X(-s) ds in closed form.
ComplexMatrix theta_operator(const SystemModel& model, const CorrelationKernel& kernel, double t);

/// rho -> scale (X Theta rho - Theta rho X - X rho Theta^dagger + rho Theta^dagger X).
Superoperator relaxation_superoperator(const ComplexMatrix& coupling, const ComplexMatrix& theta, double scale);

RedfieldGenerator build_redfield_generator(const SystemModel& model, const CorrelationKernel& kernel, double lambda);

/// Lambda_t; equals generator.lambda0 at t = 0.
Superoperator build_lambda_t(const RedfieldGenerator& generator, double t);

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> states;
    std::vector<double> min_eigenvalues;

    std::size_t size() const { return times.size(); }
};

/// Markovian evolution exp(t L) rho0 on an ascending grid of times >= 0.
Trajectory propagate_markovian(const RedfieldGenerator& generator, const DensityMatrix& rho0,
                               std::span<const double> times);

/// Order at which the time-local equation is solved.
///   Resummed:   d rho/dt = L rho + Lambda_t rho + I_t, integrated as is.
///   Linearized: rho = rho^(0) + rho^(2) with the O(lambda^2) part driven by
///               the free trajectory; this is the exact O(lambda^2) content.
enum class Expansion { Resummed, Linearized };

struct Tcl2Options {
    Expansion expansion{Expansion::Resummed};
    /// Sign of the first-order correlated part; see conventions.hpp.
    int correlation_sign{kPinnedCorrelationSign};
    /// Step halving stops once two successive grids agree to this level.
    double step_tolerance{1e-9};
    int max_halvings{8};
};

/// Time-local second-order equation with a kappa-family initial correlation,
/// whose initial-correlation term is I_t = sign * kappa * Lambda_t e^{-i L_S t} rho0.
/// kappa = 0 is a product initial state, kappa = 1 the naturally correlated one.
Trajectory propagate_tcl2(const RedfieldGenerator& generator, const DensityMatrix& rho0,
                          std::span<const double> times, double kappa, const Tcl2Options& options = {});

struct StationaryState {
    ComplexMatrix state;
    double residual{0.0};     // ||L vec(state)||
    bool degenerate{false};   // zero eigenspace of L has dimension > 1
};

StationaryState stationary_state(const RedfieldGenerator& generator);

struct PositivityOptions {
    double pos_tol{1e-12};
    double convergence_tol{1e-9};
    /// Horizon; defaults to 50 / (lambda^2 max_w Re Gamma(w)) over Bohr frequencies.
    std::optional<double> t_cap;
    /// Coarse sampling step; defaults to min(1/eps, tau_R)/16.
    std::optional<double> step;
    int refine_iterations{60};
};

struct NMembership {
    bool in_n{false};
    std::optional<double> witness_time;
    double min_eigenvalue_attained{0.0};
    double argmin_time{0.0};
    bool truncated{false};  // did not reach the stationary state by t_cap
};

/// Detects loss of positivity along the Markovian trajectory of rho0.
/// Precomputes propagators on a shared grid; evaluate() is thread-safe.
class PositivityProbe {
public:
    PositivityProbe(const RedfieldGenerator& generator, const PositivityOptions& options = {});

    NMembership evaluate(const ComplexMatrix& rho0) const;

    double t_cap() const { return t_cap_; }
    double step() const { return step_; }
    const ComplexMatrix& stationary() const { return stationary_; }

private:
    double min_eig_at(const ComplexVector& v0, double t) const;

    PositivityOptions options_;
    Propagator propagator_;
    Eigen::Index dim_;
    double t_cap_;
    double step_;
    double margin_;
    std::vector<ComplexMatrix> grid_maps_;  // exp(step * L)
    ComplexMatrix stationary_;
};

NMembership n_membership(const RedfieldGenerator& generator, const DensityMatrix& rho0,
                         const PositivityOptions& options = {});

}  // namespace natcorr
