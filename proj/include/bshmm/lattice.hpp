#ifndef BSHMM_LATTICE_HPP
#define BSHMM_LATTICE_HPP

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "bshmm/model.hpp"

namespace bshmm {

// Energies of spin configurations live on an integer lattice:
//   a = sum_{k<N} x_k x_{k+1},  b = sum_k y_k x_k,  H = -(a J + b h).
// All tie decisions are made on (a, b), never on accumulated floats.
struct LatticeEnergy {
    long long a = 0;
    long long b = 0;

    double gain(const Couplings& c) const { return static_cast<double>(a) * c.J + static_cast<double>(b) * c.h; }
    double energy(const Couplings& c) const { return -gain(c); }

    friend bool operator==(const LatticeEnergy&, const LatticeEnergy&) = default;
};

// Raised when two distinct lattice points land inside the float-ordering
// guard band in incommensurate mode; the caller should switch to
// Commensurate mode (exact boundary arithmetic) or tighten parameters.
class AmbiguityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Generic eps: h/J irrational, so equal energy <=> equal (a, b).  Ordering
// falls back to the float gain of the *difference*, with a guard band.
struct Incommensurate {
    double guard = 1e-9;
};

// Exactly at h = 2J/m: gain = (J/m) (m a + 2 b), so ordering and ties are
// a pure integer comparison and distinct lattice points can tie.
struct Commensurate {
    int m = 1;
};

using ComparisonMode = std::variant<Incommensurate, Commensurate>;

// Three-way gain comparison (+1: lhs strictly better, 0: tie).
struct IncommensurateCompare {
    double J, h, guard;

    int operator()(const LatticeEnergy& p, const LatticeEnergy& q) const {
        if (p == q) return 0;
        const double d = static_cast<double>(p.a - q.a) * J + static_cast<double>(p.b - q.b) * h;
        if (d > -guard && d < guard)
            throw AmbiguityError("distinct lattice points inside the ordering guard band");
        return d > 0 ? +1 : -1;
    }
};

struct CommensurateCompare {
    long long m;

    int operator()(const LatticeEnergy& p, const LatticeEnergy& q) const {
        const long long kp = m * p.a + 2 * p.b;
        const long long kq = m * q.a + 2 * q.b;
        return kp == kq ? 0 : (kp > kq ? +1 : -1);
    }
};

} // namespace bshmm

#endif
