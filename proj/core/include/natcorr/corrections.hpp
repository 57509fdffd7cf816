// corrections.hpp: second-order non-Markovian corrections to the reduced state,
// the perturbative solution built from them and the slipped initial condition.
//
// For an initial product state rho_S rho_R the O(lambda^2) reduced dynamics is
//     rho(t) = exp(t L) { rho_S + delta_rho1[t] + delta_rho2[t] },
//     delta_rho1[t] = lambda^2 int_0^t dt' int_0^inf dt''
//         ( C(t'+t'') [X(t'), X(-t'') rho_S] - conj C(t'+t'') [X(t'), rho_S X(-t'')] ),
// and delta_rho2 collects the initial system-reservoir correlations.

#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "natcorr/bath.hpp"
#include "natcorr/conventions.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/operators.hpp"

namespace natcorr {

struct ProductCorrelation {};

/// Q rho_T = sign * i lambda kappa [Z, rho_S rho_R], see conventions.hpp.
struct NaturalFamily {
    double kappa{1.0};
    int sign{kPinnedCorrelationSign};
};

/// A total state held by the exact oracle; its corrections are computed there.
struct ExplicitOracleState {
    std::string label;
};

using InitialCorrelation = std::variant<ProductCorrelation, NaturalFamily, ExplicitOracleState>;

/// Infinite horizon marker for delta_rho1.
inline constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// Linear map rho_S -> delta_rho1[t; rho_S]; t may be kInfiniteHorizon.
/// Throws KernelIntegrabilityError for t = inf on a kernel without a limit.
Superoperator delta_rho1_superoperator(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                                       double t);

ComplexMatrix delta_rho1(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                         const ComplexMatrix& rho_s, double t);

/// Product -> 0, NaturalFamily -> sign * kappa * delta_rho1. ExplicitOracleState
/// is rejected with std::invalid_argument (use the exact oracle).
ComplexMatrix delta_rho2(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                         const ComplexMatrix& rho_s, const InitialCorrelation& correlation, double t);

struct CorrectionReport {
    ComplexMatrix rho_s;
    ComplexMatrix delta_rho1;
    ComplexMatrix delta_rho2;
    ComplexMatrix slipped_initial;
    double kappa{0.0};
    /// Rounding bound of the closed-form sums.
    double quadrature_error_estimate{0.0};
};

CorrectionReport slipped_initial_condition(const SystemModel& model, const CorrelationKernel& kernel,
                                           double lambda, const DensityMatrix& rho_s,
                                           const InitialCorrelation& correlation);

/// {"rho_s":[[re,im],...], "delta1":..., "delta2":..., "slipped":..., "kappa":.., "err_est":..}
/// Matrices are written row-major as [re, im] pairs.
std::string correction_report_json(const CorrectionReport& report);

/// int_0^t exp(i L_S s) S exp(-i L_S s) ds in closed form.
Superoperator free_average(const Superoperator& s, const ComplexMatrix& hamiltonian, double t);

/// exp(t L) { rho_S + delta_rho1[t] + delta_rho2[t] } (Resummed), or its exact
/// O(lambda^2) truncation (Linearized), on an ascending time grid.
Trajectory perturbative_solution(const RedfieldGenerator& generator, const DensityMatrix& rho_s,
                                 const InitialCorrelation& correlation, std::span<const double> times,
                                 Expansion expansion = Expansion::Resummed);

}  // namespace natcorr
