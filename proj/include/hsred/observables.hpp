#pragma once

#include <cstddef>
#include <span>

namespace hsred {

/// Percentage deviation of a per-site energy from its full-space
/// reference: |(e_ref - e_now) / e_ref| * 100. e_ref must be nonzero.
double deviation_p(double e_ref, double e_now);

/// Shannon entropy of the squared ground-state amplitudes per site,
/// s = -(1/2L) sum P_i ln P_i with P_i = a_i^2 (0 ln 0 = 0).
/// The amplitude vector must be normalized to 1e-8.
double entropy_per_site(std::span<const double> amplitudes, int L);

/// Number of amplitudes with |a_i| strictly above the threshold.
std::size_t relevant_amplitudes(std::span<const double> amplitudes, double eps);

} // namespace hsred
