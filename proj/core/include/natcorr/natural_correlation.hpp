// natural_correlation.hpp: variational test for the absence of a naturally
// correlated total state, and region scans of the Bloch ball.
//
// For the trial vectors |psi> = |phi0>|chi> - i lambda xi int_0^t H_I(t') dt' |phi0>|chi>
// built from the lowest eigenvector |phi0> of rho_S (eigenvalue p0),
//     <psi| rho_T |psi> = p0 + lambda^2 (xi^2 A(t) - xi B(t)) + O(lambda^3),
//     A(t) = int_0^t int_0^t C(t'' - t') <phi0| X(t') rho_S X(t'') |phi0> dt' dt'',
//     B(t) = <phi0| delta_rho1[t; rho_S] |phi0> / lambda^2.
// A state lies in U' when p0 - lambda^2 sup_t B^2 / (4 A) < 0.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "natcorr/bath.hpp"
#include "natcorr/corrections.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/operators.hpp"

namespace natcorr {

struct VariationalProbe {
    double xi{0.0};
    double t{0.0};
    ComplexVector phi0;
};

struct VariationalOptions {
    /// Log-spaced coarse scan on [t_lo, t_max]; defaults derive from eps and tau_R.
    std::optional<double> t_lo;
    std::optional<double> t_max;
    std::size_t scan_points{400};
    /// Golden-section refinement stops at this relative bracket width.
    double refine_rel_width{1e-5};
    int refine_iters{80};
    /// Times with A(t) below this are excluded from the supremum.
    double a_floor{1e-14};
};

struct VariationalResult {
    double p0{0.0};
    double sup_value{0.0};
    double t_star{0.0};
    double a_at_t_star{0.0};
    double b_at_t_star{0.0};
    double bound{0.0};
    bool in_u_prime{false};
    bool degenerate_p0{false};
    /// Largest |Im A| / |A| seen on the scan.
    double imag_residue{0.0};
    std::size_t scan_points{0};
};

/// Precomputed time-dependent coefficients of A(t) and B(t) for one model and
/// kernel. Thread-safe after construction.
class VariationalKernel {
public:
    VariationalKernel(const SystemModel& model, const CorrelationKernel& kernel, const VariationalOptions& options = {});

    /// Per Bohr pair (j, l) at index j * n + l:
    ///   k, kc: delta_rho1 coefficients (lambda = 1), m: A(t) coefficient.
    struct Coefficients {
        std::vector<Complex> k;
        std::vector<Complex> kc;
        std::vector<Complex> m;
    };
    Coefficients at(double t) const;

    /// State-dependent matrix elements against |phi0>.
    struct Projection {
        double p0{0.0};
        bool degenerate{false};
        ComplexVector phi0;
        std::vector<Complex> left;   // <phi0|[X_j, X_l rho]|phi0>
        std::vector<Complex> right;  // <phi0|[X_j, rho X_l]|phi0>
        std::vector<Complex> a;      // <phi0|X_j rho X_l|phi0>
    };
    Projection project(const ComplexMatrix& rho_s) const;
    Projection project(const ComplexMatrix& rho_s, const ComplexVector& phi0) const;

    static Complex a_value(const Projection& p, const Coefficients& c);
    static Complex b_value(const Projection& p, const Coefficients& c);

    VariationalResult membership(const ComplexMatrix& rho_s, double lambda) const;

    const std::vector<double>& scan_times() const { return times_; }
    const SystemModel& model() const { return model_; }
    const CorrelationKernel& kernel() const { return kernel_; }
    const VariationalOptions& options() const { return options_; }

private:
    SystemModel model_;
    CorrelationKernel kernel_;
    VariationalOptions options_;
    std::vector<BohrComponent> components_;
    std::vector<std::size_t> negated_;  // index of the component at -w_j
    std::vector<double> times_;
    std::vector<Coefficients> table_;
};

double a_of_t(const SystemModel& model, const CorrelationKernel& kernel, const ComplexMatrix& rho_s, double t);
double b_of_t(const SystemModel& model, const CorrelationKernel& kernel, const ComplexMatrix& rho_s, double t);

/// p0 + lambda^2 (xi^2 A(t) - xi B(t)).
double variational_form(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                        const ComplexMatrix& rho_s, const VariationalProbe& probe);

VariationalResult u_prime_membership(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                                     const ComplexMatrix& rho_s, const VariationalOptions& options = {});

/// First-order naturally correlated part (kappa = 1, pinned sign).
NaturalFamily natural_state_first_order(const SystemModel& model, const CorrelationKernel& kernel, double lambda,
                                        const ComplexMatrix& rho_s);

// ---------------------------------------------------------------------------
// Region scans

struct GridSpec {
    std::size_t n{201};
    double z{0.0};
};

struct RegionPoint {
    double x{0.0};
    double y{0.0};
    double z{0.0};
    bool physical{true};
    double p0{0.0};
    double bound{0.0};
    bool in_u_prime{false};
    bool in_n{false};
    double min_eig{0.0};
    std::optional<double> witness_t;
    double t_star{0.0};
};

struct ScanSettings {
    VariationalOptions variational;
    PositivityOptions positivity;
    unsigned jobs{1};
};

struct RegionScanResult {
    GridSpec grid;
    double epsilon{0.0};
    double lambda{0.0};
    std::vector<RegionPoint> points;  // row-major: y outer, x inner

    const RegionPoint& at(std::size_t iy, std::size_t ix) const { return points[iy * grid.n + ix]; }
    std::size_t count_u_prime() const;
    std::size_t count_n() const;
};

RegionScanResult region_scan(const RedfieldGenerator& generator, const GridSpec& grid, const ScanSettings& settings);

/// N points with no U' point within one grid cell (Chebyshev distance <= 1).
std::vector<std::size_t> inclusion_violations(const RegionScanResult& result);

/// Region CSV: x,y,z,p0,bound,in_U_prime,in_N,min_eig,witness_t.
std::string region_csv(const RegionScanResult& result);

struct RadialDepth {
    double max_depth{0.0};
    double angle_of_max{0.0};
    std::vector<double> depths;  // one per ray
};

/// Depth 1 - r_c of U' along rays at angles 2 pi k / n_rays in the slice z,
/// r_c being the innermost radius where membership holds (bisection).
RadialDepth radial_depth(const VariationalKernel& vk, double lambda, double z, std::size_t n_rays,
                         double tol = 1e-7, unsigned jobs = 1);

}  // namespace natcorr
