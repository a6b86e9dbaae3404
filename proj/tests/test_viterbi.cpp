#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "bshmm/brute_force.hpp"
#include "bshmm/recursion.hpp"
#include "bshmm/sampler.hpp"
#include "bshmm/viterbi.hpp"

using namespace bshmm;

namespace {

double direct_energy(const SpinSequence& y, const SpinSequence& x, const Couplings& c) {
    double e = 0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) e -= c.J * x[k] * x[k + 1];
    for (std::size_t k = 0; k < x.size(); ++k) e -= c.h * y[k] * x[k];
    return e;
}

SpinSequence seq(std::initializer_list<int> vals) {
    SpinSequence s;
    for (int v : vals) s.push_back(static_cast<Spin>(v));
    return s;
}

} // namespace

TEST_CASE("single site aligns with the field") {
    const Couplings c = couplings(ModelParams{0.24, 0.15});
    const DecodeResult r = decode_count(seq({+1}), c, Incommensurate{});
    CHECK(r.count == 1);
    CHECK(r.energy.a == 0);
    CHECK(r.energy.b == 1);
    CHECK(r.witness == seq({+1}));
}

TEST_CASE("two-site tie in the weak-field regime") {
    // h < J: the two aligned states tie exactly on the lattice
    const ModelParams par{0.24, 0.32};
    const Couplings c = couplings(par);
    REQUIRE(c.h < c.J);
    const DecodeResult r = decode_count(seq({+1, -1}), c, Incommensurate{});
    CHECK(r.count == 2);
    CHECK(r.energy.a == 1);
    CHECK(r.energy.b == 0);
    CHECK(r.energy.energy(c) == doctest::Approx(-c.J));
    CHECK(r.witness == seq({+1, +1}));
    CHECK(r.sum_xx == 2);
    CHECK(r.sum_xy == 0);

    const DecodeStats st = stats_from(r, 2);
    CHECK(st.v_hat == doctest::Approx(0.0));
    CHECK(st.c_hat == doctest::Approx(1.0));
    CHECK(st.theta_hat == doctest::Approx(std::log(2.0) / 2.0));
}

TEST_CASE("observation-dominated regime returns the observations") {
    const Couplings c = couplings(ModelParams{0.24, 0.05});
    REQUIRE(c.h > 2.0 * c.J);
    const SpinSequence y = seq({+1, -1, +1});
    const DecodeResult r = decode_count(y, c, Incommensurate{});
    CHECK(r.count == 1);
    CHECK(r.witness == y);

    // and v_hat is exactly one on any observation in this regime
    SplitMix64 rng(split_seed(4, 4));
    SpinSequence yr(257);
    for (auto& s : yr) s = static_cast<Spin>(rng.sign());
    const DecodeStats st = decode_stats(yr, c, Incommensurate{});
    CHECK(st.v_hat == 1.0);
    CHECK(st.theta_hat == 0.0);
}

TEST_CASE("dynamic program equals brute force on random instances") {
    SplitMix64 rng(split_seed(314, 0));
    int checked = 0;
    for (int inst = 0; inst < 80; ++inst) {
        const int m_target = 1 + inst % 3;
        const bool com = inst % 2 == 0;
        const double q = 0.08 + 0.3 * rng.uniform01();
        double eps;
        ComparisonMode mode;
        if (com) {
            eps = boundary_epsilon(q, m_target);
            mode = Commensurate{m_target};
        } else {
            const double lo = m_target == 1 ? 0.01 : boundary_epsilon(q, m_target - 1);
            const double hi = boundary_epsilon(q, m_target);
            eps = lo + (hi - lo) * (0.2 + 0.6 * rng.uniform01());
            mode = Incommensurate{};
        }
        const Couplings c = couplings(ModelParams{q, eps});
        SpinSequence y(1 + rng.below(12));
        for (auto& s : y) s = static_cast<Spin>(rng.sign());

        const DecodeResult dp = decode_count(y, c, mode);
        const OracleResult bf = brute_force(y, c, mode);
        REQUIRE(dp.energy == bf.energy);
        REQUIRE(dp.count == bf.count);
        REQUIRE(dp.sum_xx == bf.sum_xx);
        REQUIRE(dp.sum_xy == bf.sum_xy);
        REQUIRE(dp.witness == bf.witnesses.front());
        ++checked;
    }
    CHECK(checked == 80);
}

TEST_CASE("comparison layer agrees with an independent float minimization") {
    // The oracle shares the lattice comparators with the DP; this check runs
    // against plain float energies instead, so the tie rules themselves are
    // exercised by something that does not use them.
    SplitMix64 rng(split_seed(640, 1));
    for (int rep = 0; rep < 40; ++rep) {
        const double q = 0.1 + 0.3 * rng.uniform01();
        const double eps = 0.05 + 0.4 * rng.uniform01();
        const Couplings c = couplings(ModelParams{q, eps});
        if (regime_index(c).on_boundary) continue;
        SpinSequence y(1 + rng.below(10));
        for (auto& s : y) s = static_cast<Spin>(rng.sign());

        const std::size_t n = y.size();
        double best = 1e300;
        std::vector<SpinSequence> minimizers;
        SpinSequence x(n);
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
            for (std::size_t k = 0; k < n; ++k)
                x[k] = (mask >> k) & 1 ? Spin{1} : Spin{-1};
            const double e = direct_energy(y, x, c);
            if (e < best - 1e-9) {
                best = e;
                minimizers.assign(1, x);
            } else if (e < best + 1e-9) {
                minimizers.push_back(x);
            }
        }
        const OracleResult bf = brute_force(y, c, Incommensurate{});
        REQUIRE(bf.count.get_ui() == minimizers.size());
        for (const auto& w : bf.witnesses)
            CHECK(std::count(minimizers.begin(), minimizers.end(), w) == 1);
    }
}

TEST_CASE("lattice energy matches a direct float recomputation") {
    const Couplings c = couplings(ModelParams{0.3, 0.21});
    SplitMix64 rng(split_seed(55, 3));
    SpinSequence y(300);
    for (auto& s : y) s = static_cast<Spin>(rng.sign());
    const DecodeResult r = decode_count(y, c, Incommensurate{});
    CHECK(r.energy.energy(c) ==
          doctest::Approx(direct_energy(y, r.witness, c)).epsilon(1e-12));
}

TEST_CASE("flip symmetry") {
    const Couplings c = couplings(ModelParams{0.24, 0.18});
    SplitMix64 rng(split_seed(21, 9));
    for (int rep = 0; rep < 20; ++rep) {
        SpinSequence y(40);
        for (auto& s : y) s = static_cast<Spin>(rng.sign());
        SpinSequence ny(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) ny[k] = static_cast<Spin>(-y[k]);

        const DecodeResult r = decode_count(y, c, Incommensurate{});
        const DecodeResult rn = decode_count(ny, c, Incommensurate{});
        CHECK(r.energy == rn.energy);
        CHECK(r.count == rn.count);
        CHECK(r.sum_xx == rn.sum_xx);
        CHECK(r.sum_xy == rn.sum_xy);

        // -witness(y) attains the optimum of the flipped instance
        SpinSequence nw(r.witness.size());
        for (std::size_t k = 0; k < nw.size(); ++k) nw[k] = static_cast<Spin>(-r.witness[k]);
        CHECK(direct_energy(ny, nw, c) ==
              doctest::Approx(rn.energy.energy(c)).epsilon(1e-12));
        if (r.count == 1) CHECK(rn.witness == nw);
    }
}

TEST_CASE("near-commensurate couplings raise the ambiguity error") {
    const double J = 0.576;
    const Couplings c{J, J * (1.0 + 1e-12)};
    const SpinSequence y = seq({+1, -1});
    CHECK_THROWS_AS(decode_count(y, c, Incommensurate{}), AmbiguityError);

    // the same instance resolves exactly in commensurate mode (h = 2J/2);
    // at h = J the antialigned (+,-) joins the two aligned states in the tie
    const DecodeResult r = decode_count(y, c, Commensurate{2});
    CHECK(r.count == 3);
}

TEST_CASE("commensurate mode rejects inconsistent couplings") {
    const Couplings c = couplings(ModelParams{0.24, 0.15});
    CHECK_THROWS_AS(decode_count(seq({+1, -1}), c, Commensurate{2}), std::invalid_argument);
}

TEST_CASE("error rate") {
    const Couplings c = couplings(ModelParams{0.24, 0.05});
    const SpinSequence y = seq({+1, -1, +1, +1});
    const DecodeResult r = decode_count(y, c, Incommensurate{});
    CHECK(error_rate(y, r) == 0.0); // witness equals y in this regime
    SpinSequence flipped(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) flipped[k] = static_cast<Spin>(-y[k]);
    CHECK(error_rate(flipped, r) == 1.0);
    CHECK_THROWS_AS(error_rate(seq({+1}), r), std::invalid_argument);
}

TEST_CASE("uniform sampling over the optimum set") {
    // weak-field two-site instance: optima are (+,+) and (-,-)
    const ModelParams par{0.24, 0.32};
    const Couplings c = couplings(par);
    OptimumSampler sampler(seq({+1, -1}), c, Incommensurate{});

    SplitMix64 rng(split_seed(1234, 0));
    int plus = 0;
    const int draws = 400;
    for (int i = 0; i < draws; ++i) {
        const SpinSequence s = sampler.sample(rng);
        REQUIRE((s == seq({+1, +1}) || s == seq({-1, -1})));
        if (s[0] > 0) ++plus;
    }
    CHECK(std::abs(plus - draws / 2) <= 3 * std::sqrt(draws * 0.25));

    // larger commensurate instance: every draw is a minimizer, frequencies
    // are uniform across the brute-force witness set
    const double q2 = 0.3;
    const double eps2 = boundary_epsilon(q2, 2);
    const Couplings c2 = couplings(ModelParams{q2, eps2});
    SpinSequence y2 = seq({+1, -1, -1, +1, -1, +1, +1, -1});
    OptimumSampler s2(y2, c2, Commensurate{2});
    const OracleResult bf = brute_force(y2, c2, Commensurate{2});
    REQUIRE(s2.result().count == bf.count);
    const unsigned long nopt = bf.count.get_ui();
    REQUIRE(nopt >= 2);

    std::map<SpinSequence, int> freq;
    const int draws2 = 6000;
    for (int i = 0; i < draws2; ++i) ++freq[s2.sample(rng)];
    const double p = 1.0 / static_cast<double>(nopt);
    for (const auto& w : bf.witnesses) {
        const double got = freq.count(w) ? freq[w] / double(draws2) : 0.0;
        CHECK(std::abs(got - p) <= 3.5 * std::sqrt(p * (1 - p) / draws2));
    }
    CHECK(freq.size() == bf.witnesses.size());
}

TEST_CASE("MAP and ML errors coincide in the observation-dominated regime") {
    // for h > 2J the optimum is unique and equals y, so the MAP error is the
    // channel error itself
    const ModelParams par{0.24, 0.05};
    const Couplings c = couplings(par);
    double map_sum = 0, ml_sum = 0;
    const int trials = 40;
    const long n = 4000;
    for (int t = 0; t < trials; ++t) {
        SplitMix64 rng(split_seed(606, static_cast<std::uint64_t>(t)));
        const auto x = sample_hidden(par, n, rng);
        const auto y = sample_observation(x, par, rng);
        const DecodeResult res = decode_count(y, c, Incommensurate{});
        map_sum += error_rate(x, res);
        double d = 0;
        for (long k = 0; k < n; ++k)
            if (x[static_cast<std::size_t>(k)] != y[static_cast<std::size_t>(k)]) d += 1;
        ml_sum += d / static_cast<double>(n);
    }
    CHECK(map_sum == ml_sum);
    const double sigma = std::sqrt(par.epsilon * (1 - par.epsilon) / (trials * n));
    CHECK(std::abs(map_sum / trials - par.epsilon) <= 3.0 * sigma);
}

TEST_CASE("count rate agrees with the finite-temperature free energy route") {
    // Independent oracle for ln(count)/N: S = beta^2 dF/dbeta computed from
    // the finite-beta recursion, no counting involved.
    const ModelParams par{0.24, 0.15};
    const Couplings c = couplings(par);
    const long n = 300000;
    SplitMix64 rng(split_seed(808, 0));
    const auto x = sample_hidden(par, n, rng);
    const auto y = sample_observation(x, par, rng);

    const auto mean_b = [&](double beta) {
        double xi = 0, acc = 0;
        for (long k = 0; k < n; ++k) {
            xi = c.h * y[static_cast<std::size_t>(k)] + a_fn(xi, c.J, beta);
            acc += b_fn(xi, c.J, beta);
        }
        return acc / static_cast<double>(n);
    };
    const double beta = 160, db = 8;
    const double thermo = beta * beta * (mean_b(beta - db) - mean_b(beta + db)) / (2 * db);

    const DecodeStats st = decode_stats(y, c, Incommensurate{});
    CHECK(st.theta_hat == doctest::Approx(thermo).epsilon(0.05));
    CHECK(st.theta_hat > 0.01); // extensive degeneracy in regime m = 2
}
