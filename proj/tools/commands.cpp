// commands.cpp: artifact-producing implementations of the natcorr subcommands.

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "natcorr/bath.hpp"
#include "natcorr/conventions.hpp"
#include "natcorr/corrections.hpp"
#include "natcorr/errors.hpp"
#include "natcorr/exact_oracle.hpp"
#include "natcorr/format.hpp"
#include "natcorr/frequency_quadrature.hpp"
#include "natcorr/kernel_io.hpp"
#include "natcorr/master_equation.hpp"
#include "natcorr/natural_correlation.hpp"

namespace natcorr::cli {

namespace {

using nlohmann::json;

constexpr const char* kCodeVersion = "1.0.0";

std::filesystem::path output_path(const RunConfig& config, const std::string& name) {
    const std::filesystem::path dir(config.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("output.directory: cannot create '" + dir.string() + "': " + ec.message());
    return dir / name;
}

void write_file(const RunConfig& config, const std::string& name, const std::string& text) {
    const auto path = output_path(config, name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw ConfigError("output.directory: cannot write '" + path.string() + "'");
}

void write_json(const RunConfig& config, const std::string& name, const json& doc) {
    write_file(config, name, doc.dump(2) + "\n");
}

/// Provenance block shared by every JSON artifact.
json provenance(const RunConfig& config, const char* command) {
    json meta;
    meta["command"] = command;
    meta["code_version"] = kCodeVersion;
    meta["config"] = config.entries;
    meta["correlation_sign"] = kPinnedCorrelationSign;
    const char* seed = std::getenv("REDFIELD_SLIPPAGE_SEED");
    meta["environment"]["REDFIELD_SLIPPAGE_SEED"] = seed ? json(seed) : json(nullptr);
    return meta;
}

json kernel_summary(const CorrelationKernel& kernel) { return json::parse(kernel_to_json(kernel)); }

json bloch_json(const BlochVector& b) { return json::array({b.x, b.y, b.z}); }

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    const double ratio = std::log(b / a);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = a;
    out.back() = b;
    return out;
}

DensityMatrix initial_state(const BlochVector& b) {
    if (!b.physical()) throw ConfigError("initial Bloch vector lies outside the unit ball");
    return bloch_to_density(b);
}

VariationalOptions variational_options(const RunConfig& config) {
    VariationalOptions v;
    v.t_lo = config.scan.t_lo;
    v.t_max = config.scan.t_hi;
    v.scan_points = config.scan.scan_points;
    v.refine_iters = config.scan.refine_iters;
    return v;
}

json variational_json(const VariationalResult& v) {
    return json{{"p0", v.p0},
                {"sup_value", v.sup_value},
                {"bound", v.bound},
                {"t_star", v.t_star},
                {"a_at_t_star", v.a_at_t_star},
                {"b_at_t_star", v.b_at_t_star},
                {"in_U_prime", v.in_u_prime},
                {"degenerate_p0", v.degenerate_p0},
                {"imag_residue", v.imag_residue},
                {"scan_points", v.scan_points}};
}

json membership_json(const NMembership& n) {
    return json{{"in_N", n.in_n},
                {"min_eigenvalue_attained", n.min_eigenvalue_attained},
                {"argmin_time", n.argmin_time},
                {"witness_time", n.witness_time ? json(*n.witness_time) : json(nullptr)},
                {"truncated", n.truncated}};
}

json curve_json(const CancellationCurve& c) {
    return json{{"sign", c.sign}, {"times", c.times}, {"residuals", c.residuals}, {"max_residual", c.max_residual}};
}

}  // namespace

void cmd_bath_correlation(const RunConfig& config, const CommandOptions&) {
    if (config.bath.type != "lorentz_drude") {
        throw ConfigError("bath-correlation compares two evaluations of a continuum bath; set bath.type = lorentz_drude");
    }
    const LorentzDrude ld = config.lorentz_drude();
    if (config.quadrature.t_min < correlation_t_min(ld)) {
        throw ConfigError("quadrature.t_min: below the smallest supported time " + format_double(correlation_t_min(ld)));
    }
    const CorrelationKernel kernel = config.kernel();
    const auto times = logspace(config.quadrature.t_min, config.quadrature.t_max, config.quadrature.n_points);

    std::ostringstream csv;
    csv << "t,re_series,im_series,re_quadrature,im_quadrature,residual\n";
    double worst = 0.0;
    for (double t : times) {
        const Complex s = lorentz_drude_series(ld, t);
        const Complex q = lorentz_drude_quadrature(ld, t, config.quadrature.rel_tol);
        if (!std::isfinite(std::abs(s)) || !std::isfinite(std::abs(q))) {
            throw ConsistencyError("bath-correlation: non-finite C(t) at t = " + format_double(t));
        }
        const double residual = std::abs(s - q) / std::abs(q);
        worst = std::max(worst, residual);
        csv << format_double(t) << ',' << format_double(s.real()) << ',' << format_double(s.imag()) << ','
            << format_double(q.real()) << ',' << format_double(q.imag()) << ',' << format_double(residual) << '\n';
    }
    write_file(config, "bath_correlation.csv", csv.str());

    json meta = provenance(config, "bath-correlation");
    meta["rows"] = times.size();
    meta["residual_definition"] = "|C_series - C_quadrature| / |C_quadrature|";
    meta["max_residual"] = worst;
    meta["tau_r"] = kernel.tau_r();
    meta["kernel"] = kernel_summary(kernel);
    write_json(config, "bath_correlation.json", meta);
}

void cmd_region_scan(const RunConfig& config, const CommandOptions& options) {
    const RedfieldGenerator generator =
        build_redfield_generator(config.system_model(), config.kernel(), config.lambda);
    ScanSettings settings;
    settings.variational = variational_options(config);
    settings.jobs = options.jobs;
    const GridSpec grid{config.scan.grid_n, config.scan.z};
    const RegionScanResult result = region_scan(generator, grid, settings);
    write_file(config, "region_scan.csv", region_csv(result));

    const VariationalKernel vk(generator.model, generator.kernel, settings.variational);
    const PositivityProbe probe(generator, settings.positivity);
    json violations = json::array();
    for (std::size_t idx : inclusion_violations(result)) {
        const RegionPoint& p = result.points[idx];
        violations.push_back(json::array({p.x, p.y}));
    }
    std::size_t physical = 0;
    for (const auto& p : result.points) physical += p.physical ? 1 : 0;

    json meta = provenance(config, "region-scan");
    meta["grid"] = {{"n", grid.n}, {"z", grid.z}, {"spacing", 2.0 / static_cast<double>(grid.n - 1)}};
    meta["counts"] = {{"physical", physical},
                      {"in_U_prime", result.count_u_prime()},
                      {"in_N", result.count_n()},
                      {"inclusion_violations", violations.size()}};
    meta["inclusion_violations"] = violations;
    meta["tolerances"] = {
        {"variational",
         {{"t_lo", vk.scan_times().front()},
          {"t_max", vk.scan_times().back()},
          {"scan_points", settings.variational.scan_points},
          {"refine_rel_width", settings.variational.refine_rel_width},
          {"refine_iters", settings.variational.refine_iters},
          {"a_floor", settings.variational.a_floor}}},
        {"positivity",
         {{"pos_tol", settings.positivity.pos_tol},
          {"convergence_tol", settings.positivity.convergence_tol},
          {"t_cap", probe.t_cap()},
          {"step", probe.step()},
          {"refine_iterations", settings.positivity.refine_iterations}}},
        {"inclusion_cells", 1}};
    meta["stationary_state"] = bloch_json(density_to_bloch(probe.stationary()));
    meta["kernel"] = kernel_summary(generator.kernel);
    write_json(config, "region_scan.json", meta);
}

void cmd_propagate(const RunConfig& config, const CommandOptions&) {
    const DensityMatrix rho0 = initial_state(config.initial);
    const RedfieldGenerator generator =
        build_redfield_generator(config.system_model(), config.kernel(), config.lambda);
    const auto times = linspace(0.0, config.propagation.t_end, config.propagation.n_points);
    const Trajectory traj = config.propagation.mode == "markov"
                                ? propagate_markovian(generator, rho0, times)
                                : propagate_tcl2(generator, rho0, times, config.propagation.kappa);

    std::ostringstream csv;
    csv << "t,x,y,z,min_eig,trace_err\n";
    double worst_min = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const BlochVector b = density_to_bloch(traj.states[i]);
        const double trace_err = std::abs(traj.states[i].trace() - Complex(1.0));
        worst_min = std::min(worst_min, traj.min_eigenvalues[i]);
        csv << format_double(traj.times[i]) << ',' << format_double(b.x) << ',' << format_double(b.y) << ','
            << format_double(b.z) << ',' << format_double(traj.min_eigenvalues[i]) << ','
            << format_double(trace_err) << '\n';
    }
    write_file(config, "trajectory.csv", csv.str());

    json meta = provenance(config, "propagate");
    meta["mode"] = config.propagation.mode;
    meta["kappa"] = config.propagation.mode == "tcl2" ? json(config.propagation.kappa) : json(nullptr);
    meta["initial"] = bloch_json(config.initial);
    meta["rows"] = traj.size();
    meta["min_eigenvalue_on_grid"] = worst_min;
    meta["kernel"] = kernel_summary(generator.kernel);
    write_json(config, "trajectory.json", meta);
}

void cmd_diagnose(const RunConfig& config, const CommandOptions&) {
    const DensityMatrix rho = initial_state(config.initial);
    const SystemModel model = config.system_model();
    const CorrelationKernel kernel = config.kernel();
    const RedfieldGenerator generator = build_redfield_generator(model, kernel, config.lambda);

    const VariationalKernel vk(model, kernel, variational_options(config));
    const VariationalResult v = vk.membership(rho.matrix(), config.lambda);
    const NMembership n = n_membership(generator, rho);
    const CorrectionReport slip = slipped_initial_condition(model, kernel, config.lambda, rho, ProductCorrelation{});

    json doc = provenance(config, "diagnose");
    doc["initial"] = bloch_json(config.initial);
    doc["lambda"] = config.lambda;
    doc["p0"] = v.p0;
    doc["bound"] = v.bound;
    doc["t_star"] = v.t_star;
    doc["in_U_prime"] = v.in_u_prime;
    doc["variational"] = variational_json(v);
    doc["positivity"] = membership_json(n);
    doc["slipped_initial_condition"] = json::parse(correction_report_json(slip));
    doc["slipped_bloch"] = bloch_json(density_to_bloch(slip.slipped_initial));
    write_json(config, "diagnose.json", doc);
}

void cmd_oracle(const RunConfig& config, const CommandOptions&) {
    const ExactOracle oracle(config.system_model(), config.oracle_bath(), config.oracle.dimension_cap);
    const DensityMatrix rho = initial_state(config.oracle.initial);

    std::vector<double> times(config.oracle.cancel_points);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = config.oracle.cancel_dt * static_cast<double>(i + 1);
    const double lambda = config.oracle.cancel_lambda;
    const CancellationCurve plus = cancellation_test(oracle, rho, lambda, +1, times);
    const CancellationCurve minus = cancellation_test(oracle, rho, lambda, -1, times);
    const int pinned = pin_correlation_sign(oracle, rho, lambda, times);
    if (pinned != kPinnedCorrelationSign) {
        throw ConsistencyError("oracle: cancellation selects sign " + std::to_string(pinned) +
                               " but the library is built with " + std::to_string(kPinnedCorrelationSign));
    }
    const CancellationCurve gibbs = gibbs_cancellation(oracle, lambda, times);

    json doc = provenance(config, "oracle");
    doc["dimension"] = oracle.dim();
    doc["recurrence_time"] = oracle.bath().recurrence_time();
    doc["initial"] = bloch_json(config.oracle.initial);
    doc["pinned_sign"] = pinned;
    doc["pinned_sign_matches_library"] = pinned == kPinnedCorrelationSign;
    doc["cancellation"] = {{"lambda", lambda},
                           {"plus", curve_json(plus)},
                           {"minus", curve_json(minus)},
                           {"gibbs", curve_json(gibbs)}};
    json scaling = json::array();
    for (double kappa : {0.0, 1.0}) {
        const ScalingReport report =
            validate_scaling(oracle, rho, config.oracle.lambdas, config.oracle.t_star, kappa);
        scaling.push_back(json::parse(scaling_report_json(report, oracle.bath())));
    }
    doc["scaling"] = scaling;
    doc["kernel"] = kernel_summary(oracle.kernel());
    write_json(config, "oracle.json", doc);
}

}  // namespace natcorr::cli
