#ifndef BSHMM_RECURSION_HPP
#define BSHMM_RECURSION_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bshmm/model.hpp"
#include "bshmm/sampler.hpp"

namespace bshmm {

// Effective-field recursion xi_k = h y_k + A(xi_{k-1}) at zero temperature.
// Every value reached is of the form n1 h + n2 J with n2 in {-1, 0, +1};
// states are keyed by the exact integer pair (plus the observation that
// produced them) so 1e6 iterations suffer no float drift.
struct XiState {
    int n1 = 0;
    int n2 = 0;
    int y_tag = 0; // +1/-1 for visited states, 0 for the seed xi_0 = 0

    double value(const Couplings& c) const { return n1 * c.h + n2 * c.J; }
    bool recurrent() const { return n2 != 0; }

    friend auto operator<=>(const XiState&, const XiState&) = default;
};

// Map to the unbarred sign sector: bar states (n2 = -1) negate onto their
// partners, matching the symmetry of the state parametrization.
XiState fold(const XiState& s);

// A(u) of the spin elimination step.  beta may be +infinity; the finite-beta
// form is evaluated through log-cosh so large beta*|u| cannot overflow.
double a_fn(double u, double J, double beta);

// B(u), the per-site free energy weight.  Same conventions as a_fn.
double b_fn(double u, double J, double beta);

// Zero-temperature step xi' = y h + A_inf(xi) on lattice coordinates.
XiState step_state(const XiState& s, int y, const Couplings& c);

// Recurrent families a_i = [(2-i)h + J, +1], b_i = [-i h + J, -1] and their
// bar images, i = 1..m.
enum class Family { A, B, ABar, BBar };

struct RecurrentId {
    Family family;
    int i = 0; // 1-based
};

std::optional<RecurrentId> classify_recurrent(const XiState& s, int m);

struct StateSets {
    int m = 0;
    std::vector<XiState> recurrent;
    std::vector<XiState> transient;
};

// Closure of {xi_0 = 0} under the step map.  Requires couplings strictly
// inside a regime; the state budget (10 m) converts a mis-classified
// boundary input into an error instead of an endless walk.
StateSets discover_states(const Couplings& c, int m_hint = 0);

struct Tally {
    std::map<XiState, std::uint64_t> counts;
    std::uint64_t total = 0;     // all recursion steps
    std::uint64_t discarded = 0; // transient prefix length

    std::uint64_t recurrent_steps() const { return total - discarded; }
    double frequency(const XiState& s) const;
    // Visit frequency of a state plus its bar image.
    double folded_frequency(const XiState& s) const;
    // Frequency of xi = +J resp. -J regardless of the observation tag.
    double frequency_xi(int n2) const;
};

Tally run_recursion(const SpinSequence& y, const Couplings& c);

// theta_hat = ln2 (freq(xi=+J) + freq(xi=-J)) / 2.
double empirical_entropy(const Tally& tally);

// Trajectory average of B(xi) over the tallied steps; converges to -f.
double empirical_minus_f(const Tally& tally, const Couplings& c);

} // namespace bshmm

#endif
