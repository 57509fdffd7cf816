// commands.hpp: the natcorr subcommands. Each writes its artifacts into the
// configured output directory and returns normally or throws.

#pragma once

#include "run_config.hpp"

namespace natcorr::cli {

struct CommandOptions {
    unsigned jobs{1};
};

/// bath_correlation.csv (t, series and quadrature C(t), relative residual)
/// plus bath_correlation.json.
void cmd_bath_correlation(const RunConfig& config, const CommandOptions& options);

/// region_scan.csv plus region_scan.json.
void cmd_region_scan(const RunConfig& config, const CommandOptions& options);

/// trajectory.csv (t, x, y, z, min_eig, trace_err) plus trajectory.json.
void cmd_propagate(const RunConfig& config, const CommandOptions& options);

/// diagnose.json for the configured initial Bloch vector.
void cmd_diagnose(const RunConfig& config, const CommandOptions& options);

/// oracle.json: scaling study, sign cancellation curves and the pinned sign.
void cmd_oracle(const RunConfig& config, const CommandOptions& options);

}  // namespace natcorr::cli
