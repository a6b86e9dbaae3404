#ifndef BSHMM_MODEL_HPP
#define BSHMM_MODEL_HPP

#include <stdexcept>

namespace bshmm {

// Binary symmetric hidden Markov model: transition flip probability q and
// observation error probability epsilon, both restricted to the open
// interval (0, 1/2) so that the Ising images J and h stay strictly positive.
struct ModelParams {
    double q = 0.24;
    double epsilon = 0.15;
};

// Ising couplings in nats: J = (1/2) ln((1-q)/q), h = (1/2) ln((1-eps)/eps).
struct Couplings {
    double J = 0.0;
    double h = 0.0;
};

// Noise regime label: the unique integer m with 2J/(m-1) > h > 2J/m
// (2J/0 read as +infinity).  When h sits within a relative tolerance of
// some 2J/k the point is flagged as a regime boundary instead.
struct RegimeIndex {
    int m = 1;
    bool on_boundary = false;
    int boundary_m = 0;
};

// Throws std::domain_error unless both parameters lie strictly in (0, 1/2).
void validate(const ModelParams& params);

Couplings couplings(const ModelParams& params);

// Classifies (J, h) into its regime.  tol is relative to h; must be in
// (0, 1e-6].
RegimeIndex regime_index(const Couplings& c, double tol = 1e-12);

// The error probability at which h(eps) = 2 J(q) / m, i.e. the first-order
// transition between regimes m and m+1:
//   eps* = 1 / (1 + ((1-q)/q)^(2/m)).
double boundary_epsilon(double q, int m);

} // namespace bshmm

#endif
