#ifndef BSHMM_BRUTE_FORCE_HPP
#define BSHMM_BRUTE_FORCE_HPP

#include <gmpxx.h>

#include <vector>

#include "bshmm/lattice.hpp"
#include "bshmm/sampler.hpp"

namespace bshmm {

// Ground truth by exhaustive enumeration over all 2^N configurations.
// Uses the same lattice comparison layer as the DP so that agreement tests
// exercise the algorithm, not a second copy of the tie rules.
struct OracleResult {
    LatticeEnergy energy; // lattice point of the preferred witness
    mpz_class count;
    mpz_class sum_xx;
    mpz_class sum_xy;
    std::vector<SpinSequence> witnesses; // all minimizers
};

// N <= 20 enforced.
OracleResult brute_force(const SpinSequence& y, const Couplings& c,
                         const ComparisonMode& mode);

} // namespace bshmm

#endif
