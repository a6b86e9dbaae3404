#include "bshmm/model.hpp"

#include <cmath>

namespace bshmm {

void validate(const ModelParams& params) {
    if (!(params.q > 0.0 && params.q < 0.5))
        throw std::domain_error("q must lie strictly in (0, 1/2)");
    if (!(params.epsilon > 0.0 && params.epsilon < 0.5))
        throw std::domain_error("epsilon must lie strictly in (0, 1/2)");
}

Couplings couplings(const ModelParams& params) {
    validate(params);
    Couplings c;
    c.J = 0.5 * std::log((1.0 - params.q) / params.q);
    c.h = 0.5 * std::log((1.0 - params.epsilon) / params.epsilon);
    return c;
}

RegimeIndex regime_index(const Couplings& c, double tol) {
    if (!(c.J > 0.0) || !(c.h > 0.0))
        throw std::domain_error("regime_index requires J > 0 and h > 0");
    if (!(tol > 0.0 && tol <= 1e-6))
        throw std::domain_error("boundary tolerance must lie in (0, 1e-6]");

    const double r = 2.0 * c.J / c.h;
    const long long k = std::llround(r);
    RegimeIndex idx;
    if (k >= 1 && std::abs(c.h - 2.0 * c.J / static_cast<double>(k)) <= tol * c.h) {
        idx.on_boundary = true;
        idx.boundary_m = static_cast<int>(k);
        idx.m = static_cast<int>(k);
        return idx;
    }
    idx.m = static_cast<int>(std::floor(r)) + 1;
    return idx;
}

double boundary_epsilon(double q, int m) {
    if (!(q > 0.0 && q < 0.5))
        throw std::domain_error("q must lie strictly in (0, 1/2)");
    if (m < 1)
        throw std::domain_error("regime index m must be >= 1");
    const double ratio = (1.0 - q) / q;
    return 1.0 / (1.0 + std::pow(ratio, 2.0 / static_cast<double>(m)));
}

} // namespace bshmm
