// kernel_io.hpp: JSON dump and load of exponential-mixture kernels.
//
// {"type":"exp_mixture","terms":[{"c_re":..,"c_im":..,"g_re":..,"g_im":..}],
//  "beta":..,"omega":..,"k_max":..,"tail_terms":..,"remainder_bound":..,
//  "regularization":"none"|"abel","correlation_sign":..}
// Doubles are written shortest-round-trip, so load(dump(k)) reproduces every
// amplitude and rate bit for bit.

#pragma once

#include <string>

#include "natcorr/bath.hpp"

namespace natcorr {

std::string kernel_to_json(const CorrelationKernel& kernel);

/// Throws std::invalid_argument on malformed input.
CorrelationKernel kernel_from_json(const std::string& text);

}  // namespace natcorr
