// exact_oracle.cpp: truncated-bath construction, exact evolution and the
// cancellation and scaling checks built on it.

#include "natcorr/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "natcorr/exp_integrals.hpp"

namespace natcorr {

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

ComplexMatrix annihilator(int n_max) {
    ComplexMatrix b = ComplexMatrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

// int_0^inf e^{z s} ds under Abel regularization.
Complex abel_integral(Complex z) {
    if (std::abs(z) < 1e-12) throw KernelIntegrabilityError("exact resonance between a bath mode and a Bohr frequency");
    return -1.0 / z;
}

double frobenius(const ComplexMatrix& m) { return m.norm(); }

}  // namespace

double truncation_weight(double frequency, double beta, int fock_cutoff) {
    return std::exp(-beta * frequency * (fock_cutoff + 1));
}

void TruncatedBath::validate(double max_truncation) const {
    DiscreteModes d = as_discrete();
    d.validate();
    for (const auto& m : modes) {
        const double w = truncation_weight(m.frequency, beta, fock_cutoff);
        if (w >= max_truncation) {
            throw std::invalid_argument("TruncatedBath: mode at w = " + std::to_string(m.frequency) +
                                        " loses thermal weight " + std::to_string(w) +
                                        " to the Fock cutoff; raise fock_cutoff or beta");
        }
    }
}

std::size_t TruncatedBath::dim() const {
    std::size_t d = 1;
    for (std::size_t i = 0; i < modes.size(); ++i) d *= static_cast<std::size_t>(fock_cutoff + 1);
    return d;
}

DiscreteModes TruncatedBath::as_discrete() const {
    DiscreteModes d;
    d.modes = modes;
    d.beta = beta;
    d.fock_cutoff = fock_cutoff;
    return d;
}

double TruncatedBath::recurrence_time() const {
    std::vector<double> w{0.0};
    for (const auto& m : modes) w.push_back(m.frequency);
    std::sort(w.begin(), w.end());
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < w.size(); ++i) spacing = std::min(spacing, w[i] - w[i - 1]);
    return spacing > 0.0 ? 2.0 * std::numbers::pi / spacing : 0.0;
}

ExactOracle::ExactOracle(SystemModel model, TruncatedBath bath, std::size_t dimension_cap)
    : model_(std::move(model)), bath_(std::move(bath)) {
    model_.validate();
    bath_.validate();
    system_dim_ = model_.dim();
    const std::size_t total = static_cast<std::size_t>(system_dim_) * bath_.dim();
    if (total > dimension_cap) {
        throw std::invalid_argument("ExactOracle: total dimension " + std::to_string(total) + " exceeds cap " +
                                    std::to_string(dimension_cap));
    }
    bath_dim_ = static_cast<Eigen::Index>(bath_.dim());
    const int n_max = bath_.fock_cutoff;
    const Eigen::Index local = n_max + 1;
    const ComplexMatrix b = annihilator(n_max);
    h_r_ = ComplexMatrix::Zero(bath_dim_, bath_dim_);
    y_ = ComplexMatrix::Zero(bath_dim_, bath_dim_);
    rho_r_ = ComplexMatrix::Ones(1, 1);
    for (std::size_t r = 0; r < bath_.modes.size(); ++r) {
        ComplexMatrix op = ComplexMatrix::Ones(1, 1);
        for (std::size_t q = 0; q < bath_.modes.size(); ++q) {
            op = kron(op, q == r ? b : ComplexMatrix(ComplexMatrix::Identity(local, local)));
        }
        annihilators_.push_back(op);
        const auto& mode = bath_.modes[r];
        h_r_ += mode.frequency * op.adjoint() * op;
        y_ += mode.coupling * (op + op.adjoint());

        ComplexMatrix gibbs = ComplexMatrix::Zero(local, local);
        double z = 0.0;
        for (int n = 0; n <= n_max; ++n) z += std::exp(-bath_.beta * mode.frequency * n);
        for (int n = 0; n <= n_max; ++n) gibbs(n, n) = std::exp(-bath_.beta * mode.frequency * n) / z;
        rho_r_ = kron(rho_r_, gibbs);
    }
}

ComplexMatrix ExactOracle::embed_system(const ComplexMatrix& a) const {
    return kron(a, ComplexMatrix::Identity(bath_dim_, bath_dim_));
}

ComplexMatrix ExactOracle::embed_bath(const ComplexMatrix& b) const {
    return kron(ComplexMatrix::Identity(system_dim_, system_dim_), b);
}

ComplexMatrix ExactOracle::total_hamiltonian(double lambda) const {
    if (!std::isfinite(lambda)) throw std::invalid_argument("total_hamiltonian: lambda must be finite");
    ComplexMatrix h = embed_system(model_.hamiltonian) + embed_bath(h_r_) + lambda * kron(model_.coupling, y_);
    return 0.5 * (h + h.adjoint());
}

CorrelationKernel ExactOracle::kernel() const { return discrete_kernel(bath_.as_discrete(), Regularization::Abel); }

Complex ExactOracle::direct_correlation(double t) const {
    // Y(t) = e^{i H_R t} Y e^{-i H_R t}; H_R is diagonal in the Fock basis.
    ComplexMatrix yt = y_;
    for (Eigen::Index a = 0; a < bath_dim_; ++a) {
        for (Eigen::Index b = 0; b < bath_dim_; ++b) {
            yt(a, b) *= std::exp(Complex(0.0, (h_r_(a, a).real() - h_r_(b, b).real()) * t));
        }
    }
    return (rho_r_ * yt * y_).trace();
}

std::vector<ExactOracle::SplitOperator> ExactOracle::w_parts(double t) const {
    std::vector<SplitOperator> parts;
    for (const auto& c : model_.coupling_components()) {
        ComplexMatrix bath_part = ComplexMatrix::Zero(bath_dim_, bath_dim_);
        for (std::size_t r = 0; r < bath_.modes.size(); ++r) {
            const double wr = bath_.modes[r].frequency;
            const double nu = bath_.modes[r].coupling;
            bath_part += nu * (exp_integral(Complex(0.0, c.frequency + wr), t) * annihilators_[r].adjoint() +
                               exp_integral(Complex(0.0, c.frequency - wr), t) * annihilators_[r]);
        }
        parts.push_back({c.op, std::move(bath_part)});
    }
    return parts;
}

std::vector<ExactOracle::SplitOperator> ExactOracle::z_parts() const {
    std::vector<SplitOperator> parts;
    for (const auto& c : model_.coupling_components()) {
        ComplexMatrix bath_part = ComplexMatrix::Zero(bath_dim_, bath_dim_);
        for (std::size_t r = 0; r < bath_.modes.size(); ++r) {
            const double wr = bath_.modes[r].frequency;
            const double nu = bath_.modes[r].coupling;
            bath_part += nu * (abel_integral(Complex(0.0, -(c.frequency + wr))) * annihilators_[r].adjoint() +
                               abel_integral(Complex(0.0, -(c.frequency - wr))) * annihilators_[r]);
        }
        parts.push_back({c.op, std::move(bath_part)});
    }
    return parts;
}

ComplexMatrix ExactOracle::assemble(const std::vector<SplitOperator>& parts) const {
    ComplexMatrix m = ComplexMatrix::Zero(system_dim_ * bath_dim_, system_dim_ * bath_dim_);
    for (const auto& p : parts) m += kron(p.system, p.bath);
    return m;
}

ComplexMatrix ExactOracle::w_operator(double t) const { return assemble(w_parts(t)); }

ComplexMatrix ExactOracle::z_operator() const { return assemble(z_parts()); }

ComplexMatrix ExactOracle::thermal_total_state(const ComplexMatrix& rho_s, const TotalCorrelation& correlation,
                                               double lambda) const {
    if (std::holds_alternative<GibbsTotal>(correlation)) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(total_hamiltonian(lambda));
        const RealVector& e = es.eigenvalues();
        const double e0 = e.minCoeff();
        RealVector weights = (-bath_.beta * (e.array() - e0)).exp().matrix();
        weights /= weights.sum();
        return es.eigenvectors() * weights.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    }
    const DensityMatrix checked(rho_s);
    if (checked.dim() != system_dim_) throw std::invalid_argument("thermal_total_state: rho_S dimension mismatch");
    ComplexMatrix product = kron(rho_s, rho_r_);
    if (const auto* nf = std::get_if<NaturalFamily>(&correlation)) {
        if (nf->sign != 1 && nf->sign != -1) throw std::invalid_argument("NaturalFamily: sign must be +1 or -1");
        const ComplexMatrix z = z_operator();
        const ComplexMatrix chi = Complex(0.0, nf->sign * lambda * nf->kappa) * commutator(z, product);
        if (hermiticity_residual(chi) > 1e-10 * std::max(1.0, chi.cwiseAbs().maxCoeff())) {
            throw ConsistencyError("thermal_total_state: correlated part assembled non-Hermitian");
        }
        product += 0.5 * (chi + chi.adjoint());
    }
    return product;
}

ComplexMatrix ExactOracle::partial_trace_bath(const ComplexMatrix& total) const {
    if (total.rows() != system_dim_ * bath_dim_ || total.cols() != total.rows()) {
        throw std::invalid_argument("partial_trace_bath: dimension mismatch");
    }
    ComplexMatrix out = ComplexMatrix::Zero(system_dim_, system_dim_);
    for (Eigen::Index s = 0; s < system_dim_; ++s) {
        for (Eigen::Index u = 0; u < system_dim_; ++u) {
            out(s, u) = total.block(s * bath_dim_, u * bath_dim_, bath_dim_, bath_dim_).trace();
        }
    }
    return out;
}

ComplexMatrix ExactOracle::correlated_part(const ComplexMatrix& total) const {
    return total - kron(partial_trace_bath(total), rho_r_);
}

Trajectory ExactOracle::evolve(double lambda, const ComplexMatrix& total0, std::span<const double> times) const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(total_hamiltonian(lambda));
    const ComplexMatrix& v = es.eigenvectors();
    const RealVector& e = es.eigenvalues();
    const ComplexMatrix rotated = v.adjoint() * total0 * v;
    Trajectory out;
    for (double t : times) {
        if (!std::isfinite(t)) throw std::invalid_argument("ExactOracle::evolve: non-finite time");
        const ComplexVector phase = (Complex(0.0, -t) * e.cast<Complex>()).array().exp().matrix();
        const ComplexMatrix evolved = phase.asDiagonal() * rotated * phase.conjugate().asDiagonal();
        ComplexMatrix rho = partial_trace_bath(v * evolved * v.adjoint());
        rho = 0.5 * (rho + rho.adjoint());
        out.times.push_back(t);
        out.min_eigenvalues.push_back(min_eigenvalue(rho));
        out.states.push_back(std::move(rho));
    }
    return out;
}

ComplexMatrix ExactOracle::direct_delta_rho2(const ComplexMatrix& correlated, double lambda, double t) const {
    if (correlated.rows() != system_dim_ * bath_dim_ || correlated.cols() != correlated.rows()) {
        throw std::invalid_argument("direct_delta_rho2: dimension mismatch");
    }
    // For W = sum_j S_j (x) B_j: Tr_R [W, chi] = sum_j [S_j, T_j] with
    // T_j(v, u) = Tr(B_j chi_vu), chi_vu being the (v, u) bath block of chi.
    ComplexMatrix reduced = ComplexMatrix::Zero(system_dim_, system_dim_);
    for (const auto& part : w_parts(t)) {
        ComplexMatrix tj(system_dim_, system_dim_);
        for (Eigen::Index v = 0; v < system_dim_; ++v) {
            for (Eigen::Index u = 0; u < system_dim_; ++u) {
                tj(v, u) = part.bath.transpose()
                               .cwiseProduct(correlated.block(v * bath_dim_, u * bath_dim_, bath_dim_, bath_dim_))
                               .sum();
            }
        }
        reduced += commutator(part.system, tj);
    }
    const ComplexMatrix r = Complex(0.0, -lambda) * reduced;
    return 0.5 * (r + r.adjoint());
}

ComplexMatrix build_total_hamiltonian(const SystemModel& model, const TruncatedBath& bath, double lambda,
                                      std::size_t dimension_cap) {
    return ExactOracle(model, bath, dimension_cap).total_hamiltonian(lambda);
}

ScalingReport validate_scaling(const ExactOracle& oracle, const DensityMatrix& rho_s,
                               const std::vector<double>& lambdas, double t_star, double kappa) {
    if (lambdas.size() < 2) throw std::invalid_argument("validate_scaling: need at least two lambdas");
    if (!(t_star > 0.0)) throw std::invalid_argument("validate_scaling: t_star must be > 0");
    if (t_star >= oracle.bath().recurrence_time()) {
        throw std::invalid_argument("validate_scaling: bath recurrence time " +
                                    std::to_string(oracle.bath().recurrence_time()) + " precedes t_star");
    }
    const CorrelationKernel kernel = oracle.kernel();
    ScalingReport report;
    report.t_star = t_star;
    report.kappa = kappa;
    const double times[] = {t_star};
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw std::invalid_argument("validate_scaling: lambdas must be > 0");
        TotalCorrelation total_corr = ProductCorrelation{};
        InitialCorrelation corr = ProductCorrelation{};
        if (kappa != 0.0) {
            total_corr = NaturalFamily{kappa, kPinnedCorrelationSign};
            corr = NaturalFamily{kappa, kPinnedCorrelationSign};
        }
        const ComplexMatrix total0 = oracle.thermal_total_state(rho_s.matrix(), total_corr, lambda);
        const Trajectory exact = oracle.evolve(lambda, total0, times);
        const RedfieldGenerator g = build_redfield_generator(oracle.model(), kernel, lambda);
        const Trajectory pert = perturbative_solution(g, rho_s, corr, times);
        report.lambdas.push_back(lambda);
        report.errors.push_back(trace_distance(exact.states[0], pert.states[0]));
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(report.lambdas.size());
    for (std::size_t i = 0; i < report.lambdas.size(); ++i) {
        const double x = std::log(report.lambdas[i]);
        const double y = std::log(std::max(report.errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return report;
}

std::string scaling_report_json(const ScalingReport& r, const TruncatedBath& bath) {
    nlohmann::json j;
    j["lambdas"] = r.lambdas;
    j["errors"] = r.errors;
    j["slope"] = r.slope;
    j["t_star"] = r.t_star;
    j["kappa"] = r.kappa;
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& m : bath.modes) modes.push_back({{"frequency", m.frequency}, {"coupling", m.coupling}});
    j["bath"] = {{"modes", modes}, {"fock_cutoff", bath.fock_cutoff}, {"beta", bath.beta}};
    return j.dump(2);
}

CancellationCurve cancellation_test(const ExactOracle& oracle, const DensityMatrix& rho_s, double lambda, int sign,
                                    std::span<const double> times) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("cancellation_test: sign must be +1 or -1");
    const ComplexMatrix total = oracle.thermal_total_state(rho_s.matrix(), NaturalFamily{1.0, sign}, lambda);
    const ComplexMatrix chi = oracle.correlated_part(total);
    const CorrelationKernel kernel = oracle.kernel();
    CancellationCurve curve;
    curve.sign = sign;
    for (double t : times) {
        const ComplexMatrix d1 = delta_rho1(oracle.model(), kernel, lambda, rho_s.matrix(), t);
        const ComplexMatrix d2 = oracle.direct_delta_rho2(chi, lambda, t);
        const double res = frobenius(d1 + d2) / frobenius(d1);
        curve.times.push_back(t);
        curve.residuals.push_back(res);
        curve.max_residual = std::max(curve.max_residual, res);
    }
    return curve;
}

CancellationCurve gibbs_cancellation(const ExactOracle& oracle, double lambda, std::span<const double> times) {
    const ComplexMatrix total = oracle.thermal_total_state(ComplexMatrix(), GibbsTotal{}, lambda);
    const ComplexMatrix rho_s = oracle.partial_trace_bath(total);
    const ComplexMatrix chi = oracle.correlated_part(total);
    const CorrelationKernel kernel = oracle.kernel();
    CancellationCurve curve;
    curve.sign = 0;
    for (double t : times) {
        const ComplexMatrix d1 = delta_rho1(oracle.model(), kernel, lambda, rho_s, t);
        const ComplexMatrix d2 = oracle.direct_delta_rho2(chi, lambda, t);
        const double res = frobenius(d1 + d2) / frobenius(d1);
        curve.times.push_back(t);
        curve.residuals.push_back(res);
        curve.max_residual = std::max(curve.max_residual, res);
    }
    return curve;
}

int pin_correlation_sign(const ExactOracle& oracle, const DensityMatrix& rho_s, double lambda,
                         std::span<const double> times, double tol) {
    const bool plus = cancellation_test(oracle, rho_s, lambda, +1, times).max_residual < tol;
    const bool minus = cancellation_test(oracle, rho_s, lambda, -1, times).max_residual < tol;
    if (plus == minus) {
        throw ConsistencyError(plus ? "both correlation signs cancel delta_rho1; the test is degenerate"
                                    : "neither correlation sign cancels delta_rho1");
    }
    return plus ? 1 : -1;
}

}  // namespace natcorr
