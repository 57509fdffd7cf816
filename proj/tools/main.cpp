// main.cpp: natcorr command-line entry point.
//
// Exit codes: 0 success, 2 configuration error, 3 kernel-integrability
// diagnostic, 4 internal consistency failure, 1 anything else.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "natcorr/errors.hpp"
#include "run_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIntegrability = 3;
constexpr int kExitConsistency = 4;

struct Invocation {
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    unsigned jobs{0};
    std::optional<std::string> out;
    std::optional<std::string> initial;
    std::optional<std::string> mode;
    std::optional<double> kappa;
};

int run(const Invocation& inv, const char* name,
        const std::function<void(const natcorr::cli::RunConfig&, const natcorr::cli::CommandOptions&)>& command) {
    using namespace natcorr;
    try {
        std::vector<std::string> overrides = inv.overrides;
        if (inv.out) overrides.push_back("output.directory=" + *inv.out);
        if (inv.mode) overrides.push_back("propagation.mode=" + *inv.mode);
        if (inv.kappa) overrides.push_back("propagation.kappa=" + std::to_string(*inv.kappa));
        if (inv.initial) {
            std::vector<std::string> parts;
            std::string item;
            for (char c : *inv.initial + ",") {
                if (c == ',') {
                    parts.push_back(item);
                    item.clear();
                } else {
                    item += c;
                }
            }
            if (parts.size() != 3) throw cli::ConfigError("--initial: expected x,y,z");
            overrides.push_back("initial.x=" + parts[0]);
            overrides.push_back("initial.y=" + parts[1]);
            overrides.push_back("initial.z=" + parts[2]);
        }
        const cli::RunConfig config = cli::load_config(inv.config_path, overrides);
        cli::CommandOptions options;
        options.jobs = inv.jobs > 0 ? inv.jobs : std::max(1u, std::thread::hardware_concurrency());

        const auto start = std::chrono::steady_clock::now();
        command(config, options);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "natcorr %s: done in %.2f s, artifacts in %s\n", name, seconds,
                     config.output.directory.c_str());
        return 0;
    } catch (const cli::ConfigError& e) {
        std::fprintf(stderr, "natcorr %s: configuration error: %s\n", name, e.what());
        return kExitConfig;
    } catch (const KernelIntegrabilityError& e) {
        std::fprintf(stderr, "natcorr %s: %s\n", name, e.what());
        return kExitIntegrability;
    } catch (const ConsistencyError& e) {
        std::fprintf(stderr, "natcorr %s: consistency failure: %s\n", name, e.what());
        return kExitConsistency;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "natcorr %s: invalid input: %s\n", name, e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "natcorr %s: error: %s\n", name, e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natcorr: natural system-reservoir correlation toolkit"};
    app.require_subcommand(1);

    Invocation inv;
    const auto common = [&inv](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "Config file with flat dotted keys")->check(CLI::ExistingFile);
        sub->add_option("--set", inv.overrides, "Override a config key (KEY=VALUE), repeatable");
        sub->add_option("--jobs", inv.jobs, "Worker threads for parallel scans (default: all cores)");
        sub->add_option("--out", inv.out, "Output directory (overrides output.directory)");
    };
    const auto initial = [&inv](CLI::App* sub) {
        sub->add_option("--initial", inv.initial, "Initial Bloch vector x,y,z (overrides initial.*)");
    };

    auto* bath = app.add_subcommand("bath-correlation", "Tabulate C(t) by pole series and by quadrature");
    common(bath);
    auto* scan = app.add_subcommand("region-scan", "Scan a Bloch-ball slice for U' and N membership");
    common(scan);
    auto* prop = app.add_subcommand("propagate", "Propagate the Markovian or time-local equation");
    common(prop);
    initial(prop);
    prop->add_option("--mode", inv.mode, "markov or tcl2 (overrides propagation.mode)");
    prop->add_option("--kappa", inv.kappa, "Initial correlation strength for tcl2 (overrides propagation.kappa)");
    auto* diag = app.add_subcommand("diagnose", "Variational bound, positivity and slippage for one state");
    common(diag);
    initial(diag);
    auto* orc = app.add_subcommand("oracle", "Exact finite-bath scaling and cancellation report");
    common(orc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    using namespace natcorr::cli;
    if (*bath) return run(inv, "bath-correlation", cmd_bath_correlation);
    if (*scan) return run(inv, "region-scan", cmd_region_scan);
    if (*prop) return run(inv, "propagate", cmd_propagate);
    if (*diag) return run(inv, "diagnose", cmd_diagnose);
    return run(inv, "oracle", cmd_oracle);
}
