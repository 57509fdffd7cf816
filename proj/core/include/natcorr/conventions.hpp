// conventions.hpp: project-wide sign of the first-order correlated part of a
// naturally correlated total state.
//
// A kappa-family total state is rho_S rho_R + Q rho_T with
//     Q rho_T = sign * i lambda kappa [Z, rho_S rho_R],   Z = int_0^inf H_I(-s) ds.
// Its initial-correlation correction is then delta_rho2 = sign * kappa * delta_rho1,
// so kappa = 1 cancels the slippage only for sign = -1. The exact-oracle
// cancellation test re-derives this value on a finite bath.

#pragma once

namespace natcorr {

inline constexpr int kPinnedCorrelationSign = -1;

}  // namespace natcorr
