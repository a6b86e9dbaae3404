#include "bshmm/brute_force.hpp"

#include <stdexcept>

namespace bshmm {

namespace {

// Witness preference mirrors the DP: maximal in (x_N, x_{N-1}, ..., x_1)
// with +1 ranked above -1.
bool preferred(const SpinSequence& cand, const SpinSequence& incumbent) {
    for (std::size_t k = cand.size(); k-- > 0;) {
        if (cand[k] != incumbent[k]) return cand[k] > incumbent[k];
    }
    return false;
}

template <class Cmp>
OracleResult enumerate(const SpinSequence& y, const Cmp& cmp) {
    const std::size_t n = y.size();
    OracleResult best;
    bool have = false;

    SpinSequence x(n);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        long long a = 0, b = 0;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = (mask >> k) & 1 ? Spin{1} : Spin{-1};
            b += static_cast<long long>(y[k]) * x[k];
            if (k > 0) a += static_cast<long long>(x[k - 1]) * x[k];
        }
        const LatticeEnergy pt{a, b};
        int order = have ? cmp(pt, best.energy) : +1;
        if (order > 0) {
            best.energy = pt;
            best.count = 1;
            best.sum_xx = static_cast<long>(a);
            best.sum_xy = static_cast<long>(b);
            best.witnesses.assign(1, x);
            have = true;
        } else if (order == 0) {
            best.count += 1;
            best.sum_xx += static_cast<long>(a);
            best.sum_xy += static_cast<long>(b);
            best.witnesses.push_back(x);
        }
    }

    // Energy field reports the preferred witness's lattice point, and the
    // witness list starts with it, for bit-for-bit comparison with the DP.
    std::size_t lead = 0;
    for (std::size_t i = 1; i < best.witnesses.size(); ++i)
        if (preferred(best.witnesses[i], best.witnesses[lead])) lead = i;
    if (lead != 0) std::swap(best.witnesses[0], best.witnesses[lead]);
    const SpinSequence& w = best.witnesses[0];
    long long a = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 < n) a += static_cast<long long>(w[k]) * w[k + 1];
        b += static_cast<long long>(y[k]) * w[k];
    }
    best.energy = LatticeEnergy{a, b};
    return best;
}

} // namespace

OracleResult brute_force(const SpinSequence& y, const Couplings& c,
                         const ComparisonMode& mode) {
    if (y.empty()) throw std::invalid_argument("observation sequence must be non-empty");
    if (y.size() > 20) throw std::invalid_argument("brute force is limited to N <= 20");

    if (const auto* inc = std::get_if<Incommensurate>(&mode))
        return enumerate(y, IncommensurateCompare{c.J, c.h, inc->guard});
    return enumerate(y, CommensurateCompare{std::get<Commensurate>(mode).m});
}

} // namespace bshmm
