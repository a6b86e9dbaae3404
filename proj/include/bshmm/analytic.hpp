#ifndef BSHMM_ANALYTIC_HPP
#define BSHMM_ANALYTIC_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "bshmm/model.hpp"
#include "bshmm/recursion.hpp"

namespace bshmm {

// Composite Markov chain over (field state, observation, hidden spin).
// The 8m x 8m matrix W is column stochastic: W(dest, src).
struct CompositeChain {
    int m = 1;
    ModelParams params;
    Couplings c;
    Eigen::MatrixXd W;
};

// Stationary weights of the unbarred field states, i = 1..m (0-based
// storage).  alpha[i] + beta[i] summed over i equals 1/2; the barred sector
// carries the mirror half.
struct StationaryMarginals {
    std::vector<double> alpha;
    std::vector<double> beta;

    int m() const { return static_cast<int>(alpha.size()); }
    double half_sum() const;
};

struct Observables {
    double f = 0.0;     // free energy per site (nats)
    double c = 0.0;     // nearest-neighbour correlator of the estimate
    double v = 0.0;     // overlap with the observations
    double theta = 0.0; // ground-state entropy per site (nats)
};

// Global state index of (family, i, z) in the 8m basis shared by both
// matrix constructions.
int chain_state_index(Family family, int i, int z, int m);

// Structured (Kronecker) construction: valid for any valid params and any
// m >= 1, including exactly at regime boundaries.
CompositeChain build_chain_structured(const ModelParams& params, int m);

// Same matrix via closure of the zero-temperature field map; requires
// couplings strictly inside regime m.  Cross-validates the structured form.
CompositeChain build_chain_closure(const ModelParams& params);

// Checked entry point: m must match regime_index(couplings(params)), or be
// one of the two regimes adjacent to a detected boundary.
CompositeChain build_chain(const ModelParams& params, int m);

enum class StationaryMethod { Auto, Dense, Power };

// Full 8m stationary vector of W (sums to one).  Dense Gaussian elimination
// with a replacement normalization row by default; power iteration above
// 8m = 256 or on request.
Eigen::VectorXd stationary_raw(const CompositeChain& chain,
                               StationaryMethod method = StationaryMethod::Auto);

// Same solve folded over the hidden spin and the bar symmetry.
StationaryMarginals stationary(const CompositeChain& chain,
                               StationaryMethod method = StationaryMethod::Auto);

// f, c, v, theta from the marginals.  at_boundary switches the entropy to
// the transition-point rule theta = [omega(alpha_2) + omega(beta_m)] ln 2.
Observables observables(const StationaryMarginals& marg, const Couplings& c,
                        bool at_boundary = false);

// Closed forms for the first two regimes; oracles for stationary().
StationaryMarginals closed_form_m1(const ModelParams& params);
StationaryMarginals closed_form_m2(const ModelParams& params);

struct ContinuityReport {
    bool ok = true;
    double eps_star = 0.0;
    double f_low = 0.0, f_high = 0.0;
    double alpha1_low = 0.0, alpha1_high = 0.0;   // omega_m(a1) vs omega_{m+1}(a1)+omega_{m+1}(b_{m+1})
    double theta_low = 0.0, theta_high = 0.0;     // omega_m(a2)+omega_m(b_m) vs omega_{m+1}(a2)+omega_{m+1}(b_m)
    std::string details;
};

// Verifies the boundary identities at eps = boundary_epsilon(q, m) by
// solving both adjacent chains; tolerance 1e-10.
ContinuityReport continuity_checks(const ModelParams& params, int m,
                                   double tol = 1e-10);

} // namespace bshmm

#endif
