// frequency_quadrature.hpp: C(t) of a Lorentz-Drude bath directly from its
// frequency-domain definition, independent of the pole expansion.

#pragma once

#include <complex>

#include "natcorr/bath.hpp"

namespace natcorr {

/// C(t) = int_0^inf J(w) [coth(beta w/2) cos(w t) - i sin(w t)] dw.
///
/// The thermal excess J (coth - 1) decays exponentially and is integrated on
/// a finite window. The remaining int J(w) e^{-i w t} dw is integrated
/// panel-wise up to a cutoff W and its oscillatory tail beyond W is summed by
/// repeated integration by parts.
std::complex<double> lorentz_drude_quadrature(const LorentzDrude& ld, double t, double rel_tol = 1e-28);

}  // namespace natcorr
