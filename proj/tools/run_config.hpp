// run_config.hpp: flat dotted-key configuration of the natcorr command line.
//
// A config file holds one "key = value" per line; '#' starts a comment.
// Every key has a default, unknown keys are rejected, and --set overrides are
// applied after the file in the order given.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "natcorr/bath.hpp"
#include "natcorr/exact_oracle.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/operators.hpp"

namespace natcorr::cli {

/// Malformed or out-of-range configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    struct Model {
        double epsilon{1.0};
    } model;

    struct Bath {
        std::string type{"lorentz_drude"};  // lorentz_drude | discrete
        double omega_cutoff{1.0};
        double beta{1.0};
        std::size_t matsubara_k_max{30};
        std::vector<BathMode> modes;        // discrete baths: "w:nu,w:nu,..."
        int fock_cutoff{5};
        std::string regularization{"none"};  // none | abel
    } bath;

    double lambda{0.5};

    struct Quadrature {
        double rel_tol{1e-28};
        double t_min{1e-3};
        double t_max{50.0};
        std::size_t n_points{200};
    } quadrature;

    struct Scan {
        std::size_t grid_n{201};
        double z{0.0};
        std::optional<double> t_lo;  // t_window = auto | lo:hi
        std::optional<double> t_hi;
        std::size_t scan_points{400};
        int refine_iters{80};
    } scan;

    struct Propagation {
        double t_end{20.0};
        std::size_t n_points{201};
        std::string mode{"markov"};  // markov | tcl2
        double kappa{0.0};
    } propagation;

    BlochVector initial{1.0, 0.0, 0.0};

    struct Oracle {
        std::vector<double> frequencies{0.6, 1.3, 1.9};
        double w_max{2.5};
        double beta{6.0};
        std::vector<double> lambdas{0.04, 0.08, 0.16};
        double t_star{2.0};
        double cancel_lambda{0.1};
        std::size_t cancel_points{32};
        double cancel_dt{0.3};
        BlochVector initial{0.3, 0.4, 0.5};
        std::size_t dimension_cap{kDefaultDimensionCap};
    } oracle;

    struct Output {
        std::string directory{"out"};
        std::string format{"csv"};
    } output;

    /// Effective value of every key as text, for provenance records.
    std::map<std::string, std::string> entries;

    void validate() const;

    SystemModel system_model() const;
    LorentzDrude lorentz_drude() const;
    /// Closed-form kernel of the configured bath.
    CorrelationKernel kernel() const;
    TruncatedBath oracle_bath() const;
};

/// Default configuration, optionally overlaid with a file and then with
/// "key=value" overrides. Throws ConfigError.
RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides);

}  // namespace natcorr::cli
