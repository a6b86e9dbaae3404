#ifndef BSHMM_RNG_HPP
#define BSHMM_RNG_HPP

#include <cstdint>

namespace bshmm {

// SplitMix64 (Steele, Lea & Flood 2014; the generator behind Java's
// SplittableRandom).  Chosen because it is tiny, fully specified, and
// bit-identical across platforms, which is what the reproducibility
// contract of the samplers requires.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fair +1/-1.
    int sign() { return (next() >> 63) ? -1 : +1; }

    // Uniform integer in [0, n), n >= 1.  Rejection-free multiply-shift.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Deterministic per-stream seed derivation: stream k of a master seed gets
// the SplitMix64 finalizer applied to seed + (k+1)*golden-gamma.  Distinct
// (seed, stream) pairs map to decorrelated states, so trials are
// order-independent and safe to run concurrently.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace bshmm

#endif
