// bath.hpp: reservoir spectral densities, the correlation function
// C(t) = Tr[rho_R Y(t) Y(0)], its half-Fourier transform and tail integrals.
//
// Every kernel used for closed-form work is an exponential mixture
//     C(t) = sum_k c_k exp(-gamma_k t),   t > 0,   C(-t) = conj(C(t)).
// Continuum baths get Re gamma_k > 0. Discrete baths have purely imaginary
// rates and only admit infinite-time integrals under explicit Abel
// regularization (exp(-eta t), eta -> 0+).

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "natcorr/errors.hpp"

namespace natcorr {

/// Ohmic density with Lorentz-Drude cutoff, J(w) = w W^2 / (w^2 + W^2).
struct LorentzDrude {
    double cutoff{1.0};  // W
    double beta{1.0};

    double spectral_density(double w) const { return w * cutoff * cutoff / (w * w + cutoff * cutoff); }
    void validate() const;
};

struct BathMode {
    double frequency{1.0};
    double coupling{0.0};  // nu_r, enters as nu_r^2
};

/// Finite set of boson modes. With a Fock cutoff the thermal occupations are
/// those of the truncated, renormalized Gibbs state of each mode.
struct DiscreteModes {
    std::vector<BathMode> modes;
    double beta{1.0};
    std::optional<int> fock_cutoff;

    void validate() const;
};

using BathSpec = std::variant<LorentzDrude, DiscreteModes>;

enum class CorrelationMethod { Quadrature, Series, Discrete };

enum class Regularization { None, Abel };

struct ExpTerm {
    std::complex<double> amplitude;
    std::complex<double> rate;
};

/// Mean occupations <b b^dagger> and <b^dagger b> of one mode at inverse
/// temperature beta, optionally in the n <= fock_cutoff truncated space.
struct ModeOccupation {
    double emission{1.0};    // <b b^dagger>
    double absorption{0.0};  // <b^dagger b>
};
ModeOccupation mode_occupation(double frequency, double beta, std::optional<int> fock_cutoff);

/// Exponential-mixture correlation kernel.
///
/// For kernels fitted to a Lorentz-Drude density the term list holds the Drude
/// pole, k_max explicit Matsubara poles, and a few moment-matched effective
/// terms that stand in for the Matsubara poles beyond k_max in every time
/// integral. Pointwise evaluation of such kernels sums the full Matsubara
/// series instead, so C(t) stays exact near its logarithmic t -> 0 singularity.
class CorrelationKernel {
public:
    CorrelationKernel() = default;
    CorrelationKernel(std::vector<ExpTerm> terms, Regularization reg = Regularization::None);

    const std::vector<ExpTerm>& terms() const { return terms_; }
    Regularization regularization() const { return regularization_; }

    /// All Re gamma_k > 1e-12.
    bool integrable() const { return integrable_; }
    /// Throws KernelIntegrabilityError unless integrable or Abel-regularized.
    void require_limit(const char* context) const;

    /// C(t) for t != 0.
    std::complex<double> operator()(double t) const;

    /// Gamma(w) = int_0^inf e^{i w t} C(t) dt.
    std::complex<double> half_fourier(double w) const;
    /// int_tau^inf e^{i w s} C(s) ds.
    std::complex<double> tail(double w, double tau) const;

    /// 1 / min_k Re gamma_k (1 / min_k |gamma_k| for undamped kernels).
    double tau_r() const { return tau_r_; }

    // Lorentz-Drude provenance, empty for other kernels.
    const std::optional<LorentzDrude>& source() const { return source_; }
    std::size_t k_max() const { return k_max_; }
    std::size_t tail_terms() const { return tail_terms_; }
    /// Integrated weight sum_{k > k_max} c_k / gamma_k of the Matsubara poles
    /// represented by the effective tail terms.
    double remainder_bound() const { return remainder_bound_; }

    void set_lorentz_drude_source(const LorentzDrude& ld, std::size_t k_max, std::size_t tail_terms,
                                  double remainder);

private:
    std::vector<ExpTerm> terms_;
    Regularization regularization_{Regularization::None};
    bool integrable_{false};
    double tau_r_{0.0};
    std::optional<LorentzDrude> source_;
    std::size_t k_max_{0};
    std::size_t tail_terms_{0};
    double remainder_bound_{0.0};
};

/// F(tau) = int_tau^inf e^{i sigma eps u} C(u) du for one system frequency.
class TailKernel {
public:
    TailKernel(CorrelationKernel kernel, double epsilon, int sigma);

    std::complex<double> operator()(double tau) const;
    int sigma() const { return sigma_; }
    double frequency() const { return sigma_ * epsilon_; }

private:
    CorrelationKernel kernel_;
    double epsilon_;
    int sigma_;
};

/// Drude pole plus the complete Matsubara series, summed with the 1/k part in
/// closed form. Valid for any t > 0.
std::complex<double> lorentz_drude_series(const LorentzDrude& ld, double t);

/// Pole-expansion kernel with k_max explicit Matsubara terms and tail_nodes
/// moment-matched effective terms for the rest.
CorrelationKernel fit_exponential_mixture(const LorentzDrude& ld, std::size_t k_max, std::size_t tail_nodes = 8);

/// Kernel of a finite bath (purely oscillatory terms).
CorrelationKernel discrete_kernel(const DiscreteModes& modes, Regularization reg = Regularization::None);

/// Uniform bins over (0, w_max]: midpoints w_r, nu_r^2 = J(w_r) dw.
DiscreteModes discretize_spectral_density(const LorentzDrude& ld, std::size_t n_modes, double w_max);

/// Modes at prescribed frequencies with weights J(w_r) times the width of the
/// Voronoi cell of w_r inside (0, w_max].
DiscreteModes discretize_at_frequencies(const LorentzDrude& ld, const std::vector<double>& frequencies,
                                        double w_max);

/// Smallest t accepted for pointwise C(t) of a continuum bath.
double correlation_t_min(const LorentzDrude& ld);

/// C(t) by the requested method.
///   Quadrature: frequency-domain adaptive quadrature (Lorentz-Drude only).
///   Series:     pole expansion (Lorentz-Drude only).
///   Discrete:   exact finite mode sum (DiscreteModes only).
std::complex<double> correlation(const BathSpec& spec, double t, CorrelationMethod method);

/// Gamma(w) from a kernel; raises the integrability diagnostic when needed.
std::complex<double> half_fourier(const CorrelationKernel& kernel, double w);

/// Re Gamma(w) = pi J(|w|) (n(|w|) + 1) for w > 0, pi J(|w|) n(|w|) for w < 0.
double spectral_rate(const LorentzDrude& ld, double w);

TailKernel tail_kernel(const CorrelationKernel& kernel, double epsilon, int sigma);

}  // namespace natcorr
