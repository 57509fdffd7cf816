// exact_oracle.hpp: exact unitary dynamics of the system coupled to a few
// Fock-truncated boson modes, used as ground truth for the perturbative layer.
//
// Basis ordering of the total space: system slot first, then the modes in the
// listed order, each spanning |0>..|n_max>. A total index is
//     s * D_R + (n_1 * (n_max+1)^{M-1} + ... + n_M).
// H_T = H_S + sum_r w_r b_r^dagger b_r + lambda X (x) Y,  Y = sum_r nu_r (b_r^dagger + b_r).

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "natcorr/bath.hpp"
#include "natcorr/corrections.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/operators.hpp"

namespace natcorr {

struct TruncatedBath {
    std::vector<BathMode> modes;
    int fock_cutoff{5};
    double beta{1.0};

    /// Throws std::invalid_argument unless every mode's discarded thermal weight
    /// sum_{n > n_max} e^{-beta w n} / Z is below max_truncation.
    void validate(double max_truncation = 1e-8) const;
    std::size_t dim() const;
    /// Same modes as a kernel input (truncated occupations).
    DiscreteModes as_discrete() const;
    /// 2 pi / smallest spacing of the mode frequencies (including 0).
    double recurrence_time() const;
};

/// e^{-beta w n_max+1}: thermal weight a mode loses to the cutoff.
double truncation_weight(double frequency, double beta, int fock_cutoff);

struct GibbsTotal {};

using TotalCorrelation = std::variant<ProductCorrelation, NaturalFamily, GibbsTotal>;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

class ExactOracle {
public:
    ExactOracle(SystemModel model, TruncatedBath bath, std::size_t dimension_cap = kDefaultDimensionCap);

    std::size_t dim() const { return static_cast<std::size_t>(system_dim_ * bath_dim_); }
    Eigen::Index bath_dim() const { return bath_dim_; }
    const SystemModel& model() const { return model_; }
    const TruncatedBath& bath() const { return bath_; }

    ComplexMatrix total_hamiltonian(double lambda) const;
    const ComplexMatrix& bath_state() const { return rho_r_; }
    /// Y in the bath space.
    const ComplexMatrix& bath_coupling() const { return y_; }

    /// Abel-regularized discrete kernel of the truncated bath.
    CorrelationKernel kernel() const;
    /// Tr[rho_R Y(t) Y(0)] evaluated directly in the truncated space.
    Complex direct_correlation(double t) const;

    /// int_0^t H_I(t') dt' and the Abel limit int_0^inf H_I(-s) ds (lambda = 1).
    ComplexMatrix w_operator(double t) const;
    ComplexMatrix z_operator() const;

    /// Product: rho_S rho_R. NaturalFamily: plus sign i lambda kappa [Z, rho_S rho_R].
    /// GibbsTotal: e^{-beta H_T} / Z (rho_S ignored).
    ComplexMatrix thermal_total_state(const ComplexMatrix& rho_s, const TotalCorrelation& correlation,
                                      double lambda) const;

    ComplexMatrix partial_trace_bath(const ComplexMatrix& total) const;
    /// Q rho_T = rho_T - Tr_R(rho_T) rho_R.
    ComplexMatrix correlated_part(const ComplexMatrix& total) const;

    /// Reduced trajectory of exp(-i H_T t) rho_T0 exp(i H_T t).
    Trajectory evolve(double lambda, const ComplexMatrix& total0, std::span<const double> times) const;

    /// delta_rho2[t] = -i lambda Tr_R [W(t), Q rho_T], from an explicit correlated part.
    ComplexMatrix direct_delta_rho2(const ComplexMatrix& correlated, double lambda, double t) const;

private:
    struct SplitOperator {
        ComplexMatrix system;
        ComplexMatrix bath;
    };
    std::vector<SplitOperator> w_parts(double t) const;
    std::vector<SplitOperator> z_parts() const;
    ComplexMatrix assemble(const std::vector<SplitOperator>& parts) const;

    ComplexMatrix embed_system(const ComplexMatrix& a) const;
    ComplexMatrix embed_bath(const ComplexMatrix& b) const;

    SystemModel model_;
    TruncatedBath bath_;
    Eigen::Index system_dim_;
    Eigen::Index bath_dim_;
    ComplexMatrix h_r_;
    ComplexMatrix y_;
    std::vector<ComplexMatrix> annihilators_;  // bath space
    ComplexMatrix rho_r_;
};

ComplexMatrix build_total_hamiltonian(const SystemModel& model, const TruncatedBath& bath, double lambda,
                                      std::size_t dimension_cap = kDefaultDimensionCap);

struct ScalingReport {
    std::vector<double> lambdas;
    std::vector<double> errors;
    double slope{0.0};
    double t_star{0.0};
    double kappa{0.0};
};

/// Trace distance between the exact reduced state at t_star and
/// exp(t L){rho_S + delta_rho1 + delta_rho2} from the same discrete kernel,
/// for each lambda; slope is the least-squares log-log slope.
ScalingReport validate_scaling(const ExactOracle& oracle, const DensityMatrix& rho_s,
                               const std::vector<double>& lambdas, double t_star, double kappa = 0.0);

std::string scaling_report_json(const ScalingReport& report, const TruncatedBath& bath);

struct CancellationCurve {
    int sign{0};
    std::vector<double> times;
    std::vector<double> residuals;  // ||delta_rho1 + delta_rho2|| / ||delta_rho1||
    double max_residual{0.0};
};

/// Relative residual of condition delta_rho1 + delta_rho2 = 0 for the
/// materialized kappa = 1 family with the given sign.
CancellationCurve cancellation_test(const ExactOracle& oracle, const DensityMatrix& rho_s, double lambda, int sign,
                                    std::span<const double> times);

/// Same residual for the correlated part of the total Gibbs state.
CancellationCurve gibbs_cancellation(const ExactOracle& oracle, double lambda, std::span<const double> times);

/// The sign whose residual stays below tol on every time. Throws
/// ConsistencyError if neither or both signs cancel.
int pin_correlation_sign(const ExactOracle& oracle, const DensityMatrix& rho_s, double lambda,
                         std::span<const double> times, double tol = 1e-8);

}  // namespace natcorr
