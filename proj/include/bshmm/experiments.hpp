#ifndef BSHMM_EXPERIMENTS_HPP
#define BSHMM_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bshmm/analytic.hpp"
#include "bshmm/model.hpp"
#include "bshmm/viterbi.hpp"

namespace bshmm {

enum class DecodeModeSpec { Auto, Incommensurate, Boundary };

struct SweepConfig {
    double q = 0.24;
    std::vector<double> eps; // explicit grid; empty + Boundary mode uses eps*(q, boundary_m)
    long n = 10000;
    int trials = 100;
    std::uint64_t seed = 1;
    DecodeModeSpec mode = DecodeModeSpec::Auto;
    int boundary_m = 1; // used when mode == Boundary
    int threads = 0;    // 0: hardware concurrency
};

// "a:b:step", inclusive of both ends up to rounding.
std::vector<double> parse_eps_range(const std::string& text);

// Analytic characterization of one (q, eps) point.
struct PointAnalysis {
    ModelParams params;
    Couplings c;
    int m = 1;
    bool on_boundary = false;
    StationaryMarginals marg; // from the lower-m side when on a boundary
    Observables obs;
};

PointAnalysis analyze_point(const ModelParams& params, DecodeModeSpec mode,
                            int boundary_m = 0);

// CSV emitters.  Columns are fixed; analytic rows leave the simulation
// cells empty.  Floats print with 9 significant digits, so identical
// configs reproduce byte-identical files.
void run_analytic(const SweepConfig& cfg, std::ostream& out);
void run_simulate(const SweepConfig& cfg, std::ostream& out,
                  const std::string& dump_path = std::string());

// Identity suite: normalization, symmetry, construction agreement,
// closed-form agreement, continuity, DP vs brute force.  Prints one line
// per block; returns overall success.
bool run_validate(std::ostream& out);

// Boundary and mid-regime entropy tables for a given q, plus a note on the
// shifted labels in the reference tables.
void run_tables(double q, std::ostream& out);

// eps*(q, m) for m = 1..m_max as CSV.
void run_boundaries(double q, int m_max, std::ostream& out);

const char* csv_header();

// ---- shared verification helpers (validate subcommand + acceptance) ----

// theta / ln2 exactly at h = 2J/m, via the m-side chain and the
// transition-point entropy rule.
double boundary_theta_over_ln2(double q, int m,
                               StationaryMethod method = StationaryMethod::Auto);

// Max |structured - closure| over all matrix entries, m from the regime.
double construction_max_diff(const ModelParams& params);

struct OracleCheck {
    bool ok = true;
    int instances = 0;
    std::string detail; // first mismatch, if any
};

// Random small instances (N <= max_n), alternating regimes m = 1,2,3 and
// both comparison modes; DP must equal brute force bit-for-bit on energy,
// count and statistic sums.
OracleCheck oracle_equivalence(int instances, int max_n, std::uint64_t seed);

} // namespace bshmm

#endif
