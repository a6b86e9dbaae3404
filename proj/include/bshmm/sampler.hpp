#ifndef BSHMM_SAMPLER_HPP
#define BSHMM_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "bshmm/model.hpp"
#include "bshmm/rng.hpp"

namespace bshmm {

using Spin = signed char; // always +1 or -1
using SpinSequence = std::vector<Spin>;

struct SampleConfig {
    long n = 10000;
    int trials = 100;
    std::uint64_t seed = 1;
};

// Hidden chain: x1 from the symmetric stationary law, each subsequent spin
// flips with probability q.
SpinSequence sample_hidden(const ModelParams& params, long n, SplitMix64& rng);

// Memoryless symmetric channel: y_k = x_k with probability 1-eps.
SpinSequence sample_observation(const SpinSequence& x, const ModelParams& params,
                                SplitMix64& rng);

} // namespace bshmm

#endif
