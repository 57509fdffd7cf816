// run_config.cpp: parsing, defaults and validation of RunConfig.

#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace natcorr::cli {

namespace {

const std::map<std::string, std::string>& default_entries() {
    static const std::map<std::string, std::string> defaults{
        {"model.epsilon", "1"},
        {"bath.type", "lorentz_drude"},
        {"bath.omega_cutoff", "1"},
        {"bath.beta", "1"},
        {"bath.matsubara_k_max", "30"},
        {"bath.modes", ""},
        {"bath.fock_cutoff", "5"},
        {"bath.regularization", "none"},
        {"lambda", "0.5"},
        {"quadrature.rel_tol", "1e-28"},
        {"quadrature.t_min", "1e-3"},
        {"quadrature.t_max", "50"},
        {"quadrature.n_points", "200"},
        {"scan.grid_n", "201"},
        {"scan.z", "0"},
        {"scan.t_window", "auto"},
        {"scan.scan_points", "400"},
        {"scan.refine_iters", "80"},
        {"propagation.t_end", "20"},
        {"propagation.n_points", "201"},
        {"propagation.mode", "markov"},
        {"propagation.kappa", "0"},
        {"initial.x", "1"},
        {"initial.y", "0"},
        {"initial.z", "0"},
        {"oracle.frequencies", "0.6,1.3,1.9"},
        {"oracle.w_max", "2.5"},
        {"oracle.beta", "6"},
        {"oracle.lambdas", "0.04,0.08,0.16"},
        {"oracle.t_star", "2"},
        {"oracle.cancel_lambda", "0.1"},
        {"oracle.cancel_points", "32"},
        {"oracle.cancel_dt", "0.3"},
        {"oracle.initial", "0.3,0.4,0.5"},
        {"oracle.dimension_cap", "4096"},
        {"output.directory", "out"},
        {"output.format", "csv"},
    };
    return defaults;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void assign(std::map<std::string, std::string>& entries, const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    it->second = value;
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const std::string s = trim(text);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": not a finite number: '" + text + "'");
    }
    return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const std::string s = trim(text);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(key + ": not an integer: '" + text + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const long long v = parse_integer(key, text);
    if (v <= 0) throw ConfigError(key + ": must be positive");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(key, item));
    return out;
}

BlochVector parse_bloch(const std::string& key, const std::string& text) {
    const auto v = parse_list(key, text);
    if (v.size() != 3) throw ConfigError(key + ": expected three comma-separated components");
    return {v[0], v[1], v[2]};
}

std::vector<BathMode> parse_modes(const std::string& key, const std::string& text) {
    std::vector<BathMode> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError(key + ": expected frequency:coupling pairs, got '" + item + "'");
        out.push_back({parse_double(key, parts[0]), parse_double(key, parts[1])});
    }
    return out;
}

void require_positive(const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be positive");
}

RunConfig from_entries(const std::map<std::string, std::string>& e) {
    RunConfig c;
    const auto get = [&](const char* key) -> const std::string& { return e.at(key); };
    const auto num = [&](const char* key) { return parse_double(key, get(key)); };
    const auto count = [&](const char* key) { return parse_count(key, get(key)); };

    c.model.epsilon = num("model.epsilon");
    c.bath.type = get("bath.type");
    c.bath.omega_cutoff = num("bath.omega_cutoff");
    c.bath.beta = num("bath.beta");
    c.bath.matsubara_k_max = count("bath.matsubara_k_max");
    c.bath.modes = parse_modes("bath.modes", get("bath.modes"));
    c.bath.fock_cutoff = static_cast<int>(parse_integer("bath.fock_cutoff", get("bath.fock_cutoff")));
    c.bath.regularization = get("bath.regularization");
    c.lambda = num("lambda");
    c.quadrature.rel_tol = num("quadrature.rel_tol");
    c.quadrature.t_min = num("quadrature.t_min");
    c.quadrature.t_max = num("quadrature.t_max");
    c.quadrature.n_points = count("quadrature.n_points");
    c.scan.grid_n = count("scan.grid_n");
    c.scan.z = num("scan.z");
    const std::string window = get("scan.t_window");
    if (window != "auto") {
        const auto parts = split(window, ':');
        if (parts.size() != 2) throw ConfigError("scan.t_window: expected 'auto' or lo:hi");
        c.scan.t_lo = parse_double("scan.t_window", parts[0]);
        c.scan.t_hi = parse_double("scan.t_window", parts[1]);
    }
    c.scan.scan_points = count("scan.scan_points");
    c.scan.refine_iters = static_cast<int>(count("scan.refine_iters"));
    c.propagation.t_end = num("propagation.t_end");
    c.propagation.n_points = count("propagation.n_points");
    c.propagation.mode = get("propagation.mode");
    c.propagation.kappa = num("propagation.kappa");
    c.initial = {num("initial.x"), num("initial.y"), num("initial.z")};
    c.oracle.frequencies = parse_list("oracle.frequencies", get("oracle.frequencies"));
    c.oracle.w_max = num("oracle.w_max");
    c.oracle.beta = num("oracle.beta");
    c.oracle.lambdas = parse_list("oracle.lambdas", get("oracle.lambdas"));
    c.oracle.t_star = num("oracle.t_star");
    c.oracle.cancel_lambda = num("oracle.cancel_lambda");
    c.oracle.cancel_points = count("oracle.cancel_points");
    c.oracle.cancel_dt = num("oracle.cancel_dt");
    c.oracle.initial = parse_bloch("oracle.initial", get("oracle.initial"));
    c.oracle.dimension_cap = count("oracle.dimension_cap");
    c.output.directory = get("output.directory");
    c.output.format = get("output.format");
    c.entries = e;
    return c;
}

}  // namespace

void RunConfig::validate() const {
    require_positive("model.epsilon", model.epsilon);
    if (bath.type != "lorentz_drude" && bath.type != "discrete") {
        throw ConfigError("bath.type: expected lorentz_drude or discrete");
    }
    require_positive("bath.omega_cutoff", bath.omega_cutoff);
    require_positive("bath.beta", bath.beta);
    if (bath.type == "discrete") {
        if (bath.modes.empty()) throw ConfigError("bath.modes: a discrete bath needs at least one mode");
        for (const auto& m : bath.modes) {
            require_positive("bath.modes frequency", m.frequency);
            require_positive("bath.modes coupling", m.coupling);
        }
    }
    if (bath.fock_cutoff < 1) throw ConfigError("bath.fock_cutoff: must be at least 1");
    if (bath.regularization != "none" && bath.regularization != "abel") {
        throw ConfigError("bath.regularization: expected none or abel");
    }
    if (!(lambda >= 0.0)) throw ConfigError("lambda: must be non-negative");
    require_positive("quadrature.rel_tol", quadrature.rel_tol);
    require_positive("quadrature.t_min", quadrature.t_min);
    if (!(quadrature.t_max > quadrature.t_min)) throw ConfigError("quadrature.t_max: must exceed t_min");
    if (quadrature.n_points < 2) throw ConfigError("quadrature.n_points: need at least 2");
    if (scan.grid_n % 2 == 0) throw ConfigError("scan.grid_n: must be odd so the centre lies on the grid");
    if (std::abs(scan.z) > 1.0) throw ConfigError("scan.z: must lie in [-1, 1]");
    if (scan.t_lo) {
        require_positive("scan.t_window lo", *scan.t_lo);
        if (!(*scan.t_hi > *scan.t_lo)) throw ConfigError("scan.t_window: hi must exceed lo");
    }
    if (scan.scan_points < 2) throw ConfigError("scan.scan_points: need at least 2");
    require_positive("propagation.t_end", propagation.t_end);
    if (propagation.n_points < 2) throw ConfigError("propagation.n_points: need at least 2");
    if (propagation.mode != "markov" && propagation.mode != "tcl2") {
        throw ConfigError("propagation.mode: expected markov or tcl2");
    }
    if (!initial.physical()) throw ConfigError("initial: Bloch vector must satisfy |r| <= 1");
    if (oracle.frequencies.empty()) throw ConfigError("oracle.frequencies: need at least one mode");
    for (double w : oracle.frequencies) require_positive("oracle.frequencies", w);
    require_positive("oracle.w_max", oracle.w_max);
    require_positive("oracle.beta", oracle.beta);
    if (oracle.lambdas.size() < 2) throw ConfigError("oracle.lambdas: need at least two values for a slope");
    for (double l : oracle.lambdas) require_positive("oracle.lambdas", l);
    require_positive("oracle.t_star", oracle.t_star);
    require_positive("oracle.cancel_lambda", oracle.cancel_lambda);
    require_positive("oracle.cancel_dt", oracle.cancel_dt);
    if (!oracle.initial.physical()) throw ConfigError("oracle.initial: Bloch vector must satisfy |r| <= 1");
    if (output.directory.empty()) throw ConfigError("output.directory: must not be empty");
    if (output.format != "csv") throw ConfigError("output.format: only csv is supported");
}

SystemModel RunConfig::system_model() const { return SystemModel::spin_boson(model.epsilon); }

LorentzDrude RunConfig::lorentz_drude() const { return LorentzDrude{bath.omega_cutoff, bath.beta}; }

CorrelationKernel RunConfig::kernel() const {
    if (bath.type == "lorentz_drude") return fit_exponential_mixture(lorentz_drude(), bath.matsubara_k_max);
    const DiscreteModes modes{bath.modes, bath.beta, bath.fock_cutoff};
    return discrete_kernel(modes, bath.regularization == "abel" ? Regularization::Abel : Regularization::None);
}

TruncatedBath RunConfig::oracle_bath() const {
    const LorentzDrude ld{bath.omega_cutoff, oracle.beta};
    const DiscreteModes modes = discretize_at_frequencies(ld, oracle.frequencies, oracle.w_max);
    return TruncatedBath{modes.modes, bath.fock_cutoff, oracle.beta};
}

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides) {
    auto entries = default_entries();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot read config file '" + *path + "'");
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            assign(entries, line, *path + ":" + std::to_string(number));
        }
    }
    for (const auto& o : overrides) assign(entries, o, "--set");
    RunConfig config = from_entries(entries);
    config.validate();
    return config;
}

}  // namespace natcorr::cli
