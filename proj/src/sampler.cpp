#include "bshmm/sampler.hpp"

#include <stdexcept>

namespace bshmm {

SpinSequence sample_hidden(const ModelParams& params, long n, SplitMix64& rng) {
    validate(params);
    if (n < 1) throw std::invalid_argument("sequence length must be >= 1");

    SpinSequence x(static_cast<std::size_t>(n));
    x[0] = static_cast<Spin>(rng.sign());
    for (long k = 1; k < n; ++k) {
        const Spin prev = x[static_cast<std::size_t>(k - 1)];
        x[static_cast<std::size_t>(k)] =
            rng.bernoulli(params.q) ? static_cast<Spin>(-prev) : prev;
    }
    return x;
}

SpinSequence sample_observation(const SpinSequence& x, const ModelParams& params,
                                SplitMix64& rng) {
    validate(params);
    SpinSequence y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        y[k] = rng.bernoulli(params.epsilon) ? static_cast<Spin>(-x[k]) : x[k];
    return y;
}

} // namespace bshmm
