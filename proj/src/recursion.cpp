#include "bshmm/recursion.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace bshmm {

namespace {

// ln cosh(x) without overflow for large |x|.
double log_cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

void require_positive_coupling(double J) {
    if (!(J > 0.0)) throw std::domain_error("J must be positive");
}

void require_interior(const Couplings& c) {
    const RegimeIndex reg = regime_index(c);
    if (reg.on_boundary)
        throw std::invalid_argument(
            "couplings sit on a regime boundary h = 2J/m; the recursion "
            "requires strict inequalities");
}

} // namespace

double a_fn(double u, double J, double beta) {
    require_positive_coupling(J);
    if (std::isinf(beta)) {
        if (u > J) return J;
        if (u < -J) return -J;
        return u;
    }
    if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
    return (log_cosh(beta * (J + u)) - log_cosh(beta * (J - u))) / (2.0 * beta);
}

double b_fn(double u, double J, double beta) {
    require_positive_coupling(J);
    if (std::isinf(beta)) return std::max(J, std::abs(u));
    if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
    return (2.0 * std::numbers::ln2 + log_cosh(beta * (J + u)) + log_cosh(beta * (J - u))) /
           (2.0 * beta);
}

XiState fold(const XiState& s) {
    if (s.n2 >= 0) return s;
    return XiState{-s.n1, -s.n2, -s.y_tag};
}

XiState step_state(const XiState& s, int y, const Couplings& c) {
    // A at beta = infinity, carried out on the integer lattice: the value is
    // recomputed from (n1, n2) each step, so nothing drifts.
    const double u = s.value(c);
    int a1 = s.n1, a2 = s.n2;
    if (u > c.J) {
        a1 = 0;
        a2 = 1;
    } else if (u < -c.J) {
        a1 = 0;
        a2 = -1;
    }
    return XiState{a1 + y, a2, y};
}

std::optional<RecurrentId> classify_recurrent(const XiState& s, int m) {
    if (s.n2 == 1 && s.y_tag == 1) {
        const int i = 2 - s.n1;
        if (i >= 1 && i <= m) return RecurrentId{Family::A, i};
    } else if (s.n2 == 1 && s.y_tag == -1) {
        const int i = -s.n1;
        if (i >= 1 && i <= m) return RecurrentId{Family::B, i};
    } else if (s.n2 == -1 && s.y_tag == -1) {
        const int i = s.n1 + 2;
        if (i >= 1 && i <= m) return RecurrentId{Family::ABar, i};
    } else if (s.n2 == -1 && s.y_tag == 1) {
        const int i = s.n1;
        if (i >= 1 && i <= m) return RecurrentId{Family::BBar, i};
    }
    return std::nullopt;
}

StateSets discover_states(const Couplings& c, int m_hint) {
    require_interior(c);
    const int m = regime_index(c).m;
    if (m_hint > 0 && m_hint != m)
        throw std::invalid_argument("m_hint does not match the couplings regime");

    const std::size_t budget = 10 * static_cast<std::size_t>(m);
    std::set<XiState> seen;
    std::deque<XiState> queue;
    const XiState seed{0, 0, 0};
    seen.insert(seed);
    queue.push_back(seed);

    while (!queue.empty()) {
        const XiState s = queue.front();
        queue.pop_front();
        for (int y : {+1, -1}) {
            const XiState t = step_state(s, y, c);
            if (seen.insert(t).second) {
                if (seen.size() > budget)
                    throw std::runtime_error(
                        "state budget exceeded; couplings are too close to a "
                        "regime boundary");
                queue.push_back(t);
            }
        }
    }

    StateSets sets;
    sets.m = m;
    for (const XiState& s : seen)
        (s.recurrent() ? sets.recurrent : sets.transient).push_back(s);

    if (sets.recurrent.size() != 4 * static_cast<std::size_t>(m))
        throw std::runtime_error("recurrent closure does not have 4m states");
    for (const XiState& s : sets.recurrent)
        if (!classify_recurrent(s, m))
            throw std::runtime_error("recurrent state outside the a/b parametrization");
    return sets;
}

Tally run_recursion(const SpinSequence& y, const Couplings& c) {
    require_interior(c);
    const int m = regime_index(c).m;

    Tally tally;
    XiState xi{0, 0, 0};
    bool transient_phase = true;
    for (const Spin yk : y) {
        xi = step_state(xi, yk, c);
        ++tally.total;
        if (transient_phase && !xi.recurrent()) {
            ++tally.discarded;
            // exit from the transient strip is diffusive in the field index
            if (tally.discarded > 64 + 40 * static_cast<std::uint64_t>(m) * m)
                throw std::runtime_error("transient prefix failed to terminate");
            continue;
        }
        transient_phase = false;
        if (!classify_recurrent(xi, m))
            throw std::runtime_error("visited state outside the recurrent set");
        ++tally.counts[xi];
    }
    return tally;
}

double Tally::frequency(const XiState& s) const {
    const auto it = counts.find(s);
    if (it == counts.end() || recurrent_steps() == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(recurrent_steps());
}

double Tally::folded_frequency(const XiState& s) const {
    const XiState bar{-s.n1, -s.n2, -s.y_tag};
    return frequency(s) + frequency(bar);
}

double Tally::frequency_xi(int n2) const {
    if (recurrent_steps() == 0) return 0.0;
    std::uint64_t hits = 0;
    for (const auto& [state, count] : counts)
        if (state.n1 == 0 && state.n2 == n2) hits += count;
    return static_cast<double>(hits) / static_cast<double>(recurrent_steps());
}

double empirical_entropy(const Tally& tally) {
    return std::numbers::ln2 * (tally.frequency_xi(+1) + tally.frequency_xi(-1)) / 2.0;
}

double empirical_minus_f(const Tally& tally, const Couplings& c) {
    if (tally.recurrent_steps() == 0) return 0.0;
    double acc = 0.0;
    for (const auto& [state, count] : tally.counts)
        acc += static_cast<double>(count) * b_fn(state.value(c), c.J,
                                                 std::numeric_limits<double>::infinity());
    return acc / static_cast<double>(tally.recurrent_steps());
}

} // namespace bshmm
