// bath.cpp: spectral densities, exponential-mixture kernels and their closed-form
// time integrals.

#include "natcorr/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "natcorr/frequency_quadrature.hpp"

namespace natcorr {

namespace {

using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Number of discrete atoms fed to the Stieltjes procedure before the far tail
// is lumped into a single atom.
constexpr std::size_t kTailAtoms = 200000;

double matsubara_ratio(const LorentzDrude& ld) { return ld.beta * ld.cutoff / (2.0 * kPi); }

}  // namespace

void LorentzDrude::validate() const {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw std::invalid_argument("LorentzDrude: cutoff must be positive");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("LorentzDrude: beta must be positive");
    }
    // cot(beta W / 2) has poles where the Drude pole meets a Matsubara pole.
    const double a = matsubara_ratio(*this);
    if (std::abs(a - std::round(a)) * 2.0 * kPi < 1e-6 && std::round(a) >= 1.0) {
        throw std::invalid_argument(
            "LorentzDrude: beta*cutoff is within 1e-6 of 2*pi*k; the Drude and Matsubara poles collide. "
            "Change beta or the cutoff slightly.");
    }
}

void DiscreteModes::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("DiscreteModes: beta must be positive");
    }
    if (modes.empty()) {
        throw std::invalid_argument("DiscreteModes: at least one mode required");
    }
    for (const auto& m : modes) {
        if (!(m.frequency > 0.0) || !std::isfinite(m.coupling)) {
            throw std::invalid_argument("DiscreteModes: mode frequencies must be positive");
        }
    }
    if (fock_cutoff && *fock_cutoff < 1) {
        throw std::invalid_argument("DiscreteModes: fock_cutoff must be >= 1");
    }
}

ModeOccupation mode_occupation(double frequency, double beta, std::optional<int> fock_cutoff) {
    const double x = beta * frequency;
    if (!fock_cutoff) {
        const double n = 1.0 / std::expm1(x);
        return {n + 1.0, n};
    }
    const int n_max = *fock_cutoff;
    double z = 0.0;
    double absorption = 0.0;
    double emission = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = std::exp(-x * n);
        z += p;
        absorption += p * n;
        if (n < n_max) emission += p * (n + 1);
    }
    return {emission / z, absorption / z};
}

CorrelationKernel::CorrelationKernel(std::vector<ExpTerm> terms, Regularization reg)
    : terms_(std::move(terms)), regularization_(reg) {
    if (terms_.empty()) {
        throw std::invalid_argument("CorrelationKernel: no terms");
    }
    integrable_ = true;
    double slowest = std::numeric_limits<double>::infinity();
    double slowest_abs = std::numeric_limits<double>::infinity();
    for (const auto& term : terms_) {
        if (!std::isfinite(term.amplitude.real()) || !std::isfinite(term.amplitude.imag()) ||
            !std::isfinite(term.rate.real()) || !std::isfinite(term.rate.imag())) {
            throw std::invalid_argument("CorrelationKernel: non-finite term");
        }
        if (term.rate.real() < 0.0) {
            throw std::invalid_argument("CorrelationKernel: growing term (Re gamma < 0)");
        }
        if (term.rate.real() <= 1e-12) integrable_ = false;
        slowest = std::min(slowest, term.rate.real());
        slowest_abs = std::min(slowest_abs, std::abs(term.rate));
    }
    tau_r_ = integrable_ ? 1.0 / slowest : 1.0 / std::max(slowest_abs, 1e-300);
}

void CorrelationKernel::require_limit(const char* context) const {
    if (!integrable_ && regularization_ != Regularization::Abel) {
        throw KernelIntegrabilityError(std::string(context) +
                                       " requires Re gamma_k > 0 for every term (or explicit Abel regularization)");
    }
}

void CorrelationKernel::set_lorentz_drude_source(const LorentzDrude& ld, std::size_t k_max,
                                                 std::size_t tail_terms, double remainder) {
    source_ = ld;
    k_max_ = k_max;
    tail_terms_ = tail_terms;
    remainder_bound_ = remainder;
}

C CorrelationKernel::operator()(double t) const {
    if (t == 0.0 || !std::isfinite(t)) {
        throw std::invalid_argument("CorrelationKernel: C(t) requires finite t != 0");
    }
    if (t < 0.0) return std::conj((*this)(-t));
    if (source_) return lorentz_drude_series(*source_, t);
    C sum = 0.0;
    for (const auto& term : terms_) sum += term.amplitude * std::exp(-term.rate * t);
    return sum;
}

C CorrelationKernel::half_fourier(double w) const { return tail(w, 0.0); }

C CorrelationKernel::tail(double w, double tau) const {
    require_limit("tail integral");
    if (tau < 0.0) throw std::invalid_argument("CorrelationKernel::tail: tau must be >= 0");
    C sum = 0.0;
    for (const auto& term : terms_) {
        const C denom = term.rate - C(0.0, w);
        if (std::abs(denom) < 1e-12) {
            throw KernelIntegrabilityError("exact resonance between a bath term and frequency " + std::to_string(w));
        }
        sum += term.amplitude * std::exp(-denom * tau) / denom;
    }
    return sum;
}

TailKernel::TailKernel(CorrelationKernel kernel, double epsilon, int sigma)
    : kernel_(std::move(kernel)), epsilon_(epsilon), sigma_(sigma) {
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("TailKernel: sigma must be +1 or -1");
    kernel_.require_limit("tail kernel");
}

C TailKernel::operator()(double tau) const { return kernel_.tail(sigma_ * epsilon_, tau); }

C lorentz_drude_series(const LorentzDrude& ld, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("lorentz_drude_series: t must be > 0");
    const double w2 = ld.cutoff * ld.cutoff;
    const double a = matsubara_ratio(ld);
    const double nu1 = 2.0 * kPi / ld.beta;

    const C drude = 0.5 * kPi * w2 * C(1.0 / std::tan(0.5 * ld.beta * ld.cutoff), -1.0) * std::exp(-ld.cutoff * t);

    // c_k = W^2 k/(k^2 - a^2) = W^2/k + W^2 a^2/(k (k^2 - a^2)); the first part
    // sums to -W^2 log(1 - x) with x = exp(-nu1 t).
    const double log_part = -w2 * std::log(-std::expm1(-nu1 * t));
    const double x = std::exp(-nu1 * t);
    double correction = 0.0;
    double xk = 1.0;
    const double a2 = a * a;
    for (std::size_t k = 1; k < 200000; ++k) {
        xk *= x;
        const double kd = static_cast<double>(k);
        correction += xk / (kd * (kd * kd - a2));
        if (kd > 2.0 * a + 2.0 && xk * a2 / (kd * kd) < 1e-17 * (std::abs(correction) * a2 + 1e-300)) break;
        if (xk < 1e-300) break;
    }
    return drude + C(log_part + w2 * a2 * correction, 0.0);
}

CorrelationKernel fit_exponential_mixture(const LorentzDrude& ld, std::size_t k_max, std::size_t tail_nodes) {
    ld.validate();
    if (k_max < 1) throw std::invalid_argument("fit_exponential_mixture: k_max must be >= 1");
    const double a = matsubara_ratio(ld);
    if (static_cast<double>(k_max) < a) {
        throw std::invalid_argument("fit_exponential_mixture: k_max must be at least beta*cutoff/(2 pi) = " +
                                    std::to_string(a));
    }
    const double w2 = ld.cutoff * ld.cutoff;
    const double nu1 = 2.0 * kPi / ld.beta;

    std::vector<ExpTerm> terms;
    terms.push_back({0.5 * kPi * w2 * C(1.0 / std::tan(0.5 * ld.beta * ld.cutoff), -1.0), C(ld.cutoff, 0.0)});
    for (std::size_t k = 1; k <= k_max; ++k) {
        const double kd = static_cast<double>(k);
        terms.push_back({C(w2 * kd / (kd * kd - a * a), 0.0), C(nu1 * kd, 0.0)});
    }

    // Poles k > k_max form a positive measure in s = 1/nu_k with weights
    // c_k/nu_k. Gauss quadrature of that measure gives effective exponential
    // terms matching its first 2*tail_nodes moments.
    const double first = static_cast<double>(k_max + 1);
    const double weight_scale = w2 * ld.beta / (2.0 * kPi);
    std::vector<double> xs;
    std::vector<double> ws;
    xs.reserve(kTailAtoms + 1);
    ws.reserve(kTailAtoms + 1);
    double remainder = 0.0;
    for (std::size_t i = 0; i < kTailAtoms; ++i) {
        const double kd = first + static_cast<double>(i);
        xs.push_back(first / kd);
        ws.push_back(weight_scale / (kd * kd - a * a));
        remainder += ws.back();
    }
    {
        const double m = first + static_cast<double>(kTailAtoms) - 1.0;
        const double far = weight_scale * (1.0 / m - 0.5 / (m * m) + (1.0 / 6.0 + a * a / 3.0) / (m * m * m));
        xs.push_back(first / (2.0 * m));
        ws.push_back(far);
        remainder += far;
    }

    if (tail_nodes > 0) {
        const std::size_t n = xs.size();
        std::vector<double> p_prev(n, 0.0);
        std::vector<double> p(n, 1.0);
        std::vector<double> alpha(tail_nodes);
        std::vector<double> beta_coef(tail_nodes);
        double norm_prev = 1.0;
        for (std::size_t j = 0; j < tail_nodes; ++j) {
            double norm = 0.0;
            double first_moment = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double wp2 = ws[i] * p[i] * p[i];
                norm += wp2;
                first_moment += wp2 * xs[i];
            }
            alpha[j] = first_moment / norm;
            beta_coef[j] = (j == 0) ? norm : norm / norm_prev;
            norm_prev = norm;
            for (std::size_t i = 0; i < n; ++i) {
                const double next = (xs[i] - alpha[j]) * p[i] - (j == 0 ? 0.0 : beta_coef[j]) * p_prev[i];
                p_prev[i] = p[i];
                p[i] = next;
            }
        }
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tail_nodes),
                                                       static_cast<Eigen::Index>(tail_nodes));
        for (std::size_t j = 0; j < tail_nodes; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            jacobi(jj, jj) = alpha[j];
            if (j + 1 < tail_nodes) {
                const double off = std::sqrt(beta_coef[j + 1]);
                jacobi(jj, jj + 1) = off;
                jacobi(jj + 1, jj) = off;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
        const double s_max = 1.0 / (nu1 * first);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double node = es.eigenvalues()(i);
            const double weight = beta_coef[0] * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
            if (!(node > 0.0) || !(weight > 0.0)) {
                throw ConsistencyError("fit_exponential_mixture: tail quadrature produced a non-positive node");
            }
            const double rate = 1.0 / (node * s_max);
            terms.push_back({C(weight * rate, 0.0), C(rate, 0.0)});
        }
    }

    CorrelationKernel kernel(std::move(terms));
    kernel.set_lorentz_drude_source(ld, k_max, tail_nodes, remainder);
    return kernel;
}

CorrelationKernel discrete_kernel(const DiscreteModes& modes, Regularization reg) {
    modes.validate();
    std::vector<ExpTerm> terms;
    for (const auto& mode : modes.modes) {
        const auto occ = mode_occupation(mode.frequency, modes.beta, modes.fock_cutoff);
        const double g2 = mode.coupling * mode.coupling;
        terms.push_back({C(g2 * occ.emission, 0.0), C(0.0, mode.frequency)});
        terms.push_back({C(g2 * occ.absorption, 0.0), C(0.0, -mode.frequency)});
    }
    return CorrelationKernel(std::move(terms), reg);
}

DiscreteModes discretize_spectral_density(const LorentzDrude& ld, std::size_t n_modes, double w_max) {
    ld.validate();
    if (n_modes < 1) throw std::invalid_argument("discretize_spectral_density: n_modes must be >= 1");
    if (!(w_max > 0.0)) throw std::invalid_argument("discretize_spectral_density: w_max must be > 0");
    DiscreteModes out;
    out.beta = ld.beta;
    const double dw = w_max / static_cast<double>(n_modes);
    for (std::size_t r = 0; r < n_modes; ++r) {
        const double w = (static_cast<double>(r) + 0.5) * dw;
        out.modes.push_back({w, std::sqrt(ld.spectral_density(w) * dw)});
    }
    return out;
}

DiscreteModes discretize_at_frequencies(const LorentzDrude& ld, const std::vector<double>& frequencies,
                                        double w_max) {
    ld.validate();
    if (frequencies.empty()) throw std::invalid_argument("discretize_at_frequencies: no frequencies");
    std::vector<double> w = frequencies;
    if (!std::is_sorted(w.begin(), w.end()) || w.front() <= 0.0 || w.back() >= w_max) {
        throw std::invalid_argument("discretize_at_frequencies: frequencies must ascend inside (0, w_max)");
    }
    DiscreteModes out;
    out.beta = ld.beta;
    for (std::size_t r = 0; r < w.size(); ++r) {
        const double lo = (r == 0) ? 0.0 : 0.5 * (w[r - 1] + w[r]);
        const double hi = (r + 1 == w.size()) ? std::min(w_max, w[r] + (w[r] - lo)) : 0.5 * (w[r] + w[r + 1]);
        out.modes.push_back({w[r], std::sqrt(ld.spectral_density(w[r]) * (hi - lo))});
    }
    return out;
}

double correlation_t_min(const LorentzDrude& ld) { return 1e-6 / ld.cutoff; }

C correlation(const BathSpec& spec, double t, CorrelationMethod method) {
    if (const auto* ld = std::get_if<LorentzDrude>(&spec)) {
        ld->validate();
        if (!(t >= correlation_t_min(*ld)) || !std::isfinite(t)) {
            throw std::invalid_argument("correlation: continuum C(t) requires t >= t_min = 1e-6/cutoff");
        }
        switch (method) {
            case CorrelationMethod::Series: return lorentz_drude_series(*ld, t);
            case CorrelationMethod::Quadrature: return lorentz_drude_quadrature(*ld, t);
            case CorrelationMethod::Discrete:
                throw std::invalid_argument("correlation: discrete method needs a DiscreteModes bath");
        }
    }
    const auto& dm = std::get<DiscreteModes>(spec);
    if (method != CorrelationMethod::Discrete) {
        throw std::invalid_argument("correlation: no pole expansion or quadrature for a discrete bath");
    }
    dm.validate();
    C sum = 0.0;
    for (const auto& mode : dm.modes) {
        const auto occ = mode_occupation(mode.frequency, dm.beta, dm.fock_cutoff);
        const double g2 = mode.coupling * mode.coupling;
        sum += g2 * (occ.emission * std::exp(C(0.0, -mode.frequency * t)) +
                     occ.absorption * std::exp(C(0.0, mode.frequency * t)));
    }
    return sum;
}

C half_fourier(const CorrelationKernel& kernel, double w) {
    kernel.require_limit("half_fourier");
    return kernel.half_fourier(w);
}

double spectral_rate(const LorentzDrude& ld, double w) {
    const double aw = std::abs(w);
    if (aw == 0.0) {
        return kPi / ld.beta;
    }
    const double j = ld.spectral_density(aw);
    const double n = 1.0 / std::expm1(ld.beta * aw);
    return kPi * j * (w > 0.0 ? n + 1.0 : n);
}

TailKernel tail_kernel(const CorrelationKernel& kernel, double epsilon, int sigma) {
    return TailKernel(kernel, epsilon, sigma);
}

}  // namespace natcorr
