#ifndef BSHMM_VITERBI_HPP
#define BSHMM_VITERBI_HPP

#include <gmpxx.h>

#include <array>
#include <vector>

#include "bshmm/lattice.hpp"
#include "bshmm/rng.hpp"
#include "bshmm/sampler.hpp"

namespace bshmm {

// Exact MAP decode of one observation sequence.  count is the exact number
// of energy minimizers under the mode's tie notion; sum_xx / sum_xy are the
// totals of sum x_k x_{k+1} and sum y_k x_k over *all* minimizers, so
// degeneracy-averaged statistics come out exactly.  The witness is the
// minimizer that prefers x_k = +1 on every tie, walking from the last site.
struct DecodeResult {
    LatticeEnergy energy; // lattice point of the witness
    mpz_class count;
    mpz_class sum_xx;
    mpz_class sum_xy;
    SpinSequence witness;
};

struct DecodeStats {
    double v_hat = 0.0;     // sum_xy / (count N)
    double c_hat = 0.0;     // sum_xx / (count (N-1)); 0 for N = 1
    double theta_hat = 0.0; // ln(count) / N
};

DecodeResult decode_count(const SpinSequence& y, const Couplings& c,
                          const ComparisonMode& mode);

DecodeStats stats_from(const DecodeResult& r, std::size_t n);

DecodeStats decode_stats(const SpinSequence& y, const Couplings& c,
                         const ComparisonMode& mode);

// Fraction of sites where the witness differs from the true sequence.
double error_rate(const SpinSequence& x_true, const DecodeResult& r);

// Retains the per-site value/count tables so individual optima can be drawn
// uniformly at random (backward sampling proportional to branch counts).
class OptimumSampler {
public:
    OptimumSampler(const SpinSequence& y, const Couplings& c, const ComparisonMode& mode);

    const DecodeResult& result() const { return result_; }
    SpinSequence sample(SplitMix64& rng) const;

private:
    SpinSequence y_;
    Couplings c_;
    ComparisonMode mode_;
    DecodeResult result_;
    std::vector<std::array<LatticeEnergy, 2>> lattice_; // per site, index 0 = spin +1
    std::vector<std::array<mpz_class, 2>> counts_;
};

} // namespace bshmm

#endif
