#include "hsred/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace hsred {

double deviation_p(double e_ref, double e_now) {
    if (e_ref == 0.0)
        throw std::invalid_argument("deviation_p: reference energy is zero");
    return std::abs((e_ref - e_now) / e_ref) * 100.0;
}

double entropy_per_site(std::span<const double> amplitudes, int L) {
    if (L < 1) throw std::invalid_argument("entropy_per_site: L must be positive");
    double nrm2 = 0.0;
    for (double a : amplitudes) nrm2 += a * a;
    if (std::abs(std::sqrt(nrm2) - 1.0) > 1e-8)
        throw std::invalid_argument("entropy_per_site: amplitude vector not normalized");
    double s = 0.0;
    for (double a : amplitudes) {
        const double p = a * a;
        if (p > 0.0) s -= p * std::log(p);
    }
    return s / (2.0 * L);
}

std::size_t relevant_amplitudes(std::span<const double> amplitudes, double eps) {
    std::size_t count = 0;
    for (double a : amplitudes)
        if (std::abs(a) > eps) count++;
    return count;
}

} // namespace hsred
