#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bshmm/analytic.hpp"

using namespace bshmm;

TEST_CASE("chain entries and block identities at m = 1") {
    const ModelParams par{0.24, 0.05};
    const CompositeChain chain = build_chain(par, 1);
    REQUIRE(chain.W.rows() == 8);

    // a1 -> a1 with z' = z = +1 carries pi(+1|+1) p(+1|+1)
    const int a1p = chain_state_index(Family::A, 1, +1, 1);
    CHECK(chain.W(a1p, a1p) == doctest::Approx(0.722).epsilon(1e-12));

    // summing the destination observation recovers the hidden transition law
    const int b1p = chain_state_index(Family::B, 1, +1, 1);
    const int a1m = chain_state_index(Family::A, 1, -1, 1);
    const int b1m = chain_state_index(Family::B, 1, -1, 1);
    CHECK(chain.W(a1p, a1p) + chain.W(b1p, a1p) == doctest::Approx(1 - par.q).epsilon(1e-14));
    CHECK(chain.W(a1m, a1p) + chain.W(b1m, a1p) == doctest::Approx(par.q).epsilon(1e-14));

    for (int col = 0; col < 8; ++col)
        CHECK(chain.W.col(col).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("m = 3 sparsity pattern matches the transition graph") {
    const ModelParams par{0.24, 0.28};
    const CompositeChain chain = build_chain(par, 3);
    REQUIRE(chain.W.rows() == 24);

    const auto block_weight = [&](Family fd, int id, Family fs, int is) {
        double acc = 0;
        for (int zd : {+1, -1})
            for (int zs : {+1, -1})
                acc += chain.W(chain_state_index(fd, id, zd, 3),
                               chain_state_index(fs, is, zs, 3));
        return acc;
    };

    // allowed arcs
    CHECK(block_weight(Family::A, 1, Family::A, 1) > 0);    // a1 self
    CHECK(block_weight(Family::B, 1, Family::A, 1) > 0);    // a1 -> b1
    CHECK(block_weight(Family::A, 2, Family::B, 1) > 0);    // b1 -> a2
    CHECK(block_weight(Family::B, 2, Family::B, 1) > 0);    // b1 -> b2
    CHECK(block_weight(Family::A, 1, Family::A, 2) > 0);    // a2 -> a1
    CHECK(block_weight(Family::ABar, 1, Family::B, 3) > 0); // b3 -> abar1
    CHECK(block_weight(Family::BBar, 1, Family::B, 3) > 0); // b3 -> bbar1
    CHECK(block_weight(Family::A, 1, Family::BBar, 3) > 0); // bbar3 -> a1

    // forbidden arcs
    CHECK(block_weight(Family::A, 2, Family::A, 1) == 0.0);
    CHECK(block_weight(Family::B, 3, Family::B, 1) == 0.0);
    CHECK(block_weight(Family::ABar, 1, Family::A, 1) == 0.0);
    CHECK(block_weight(Family::A, 3, Family::B, 3) == 0.0);
}

TEST_CASE("structured and closure constructions agree entrywise") {
    for (int m = 1; m <= 6; ++m) {
        const double lo = m == 1 ? 0.0 : boundary_epsilon(0.24, m - 1);
        const double hi = boundary_epsilon(0.24, m);
        const ModelParams par{0.24, 0.5 * (lo + hi)};
        const CompositeChain a = build_chain_closure(par);
        REQUIRE(a.m == m);
        const CompositeChain b = build_chain_structured(par, m);
        CHECK((a.W - b.W).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("build_chain validates the regime") {
    CHECK_THROWS_AS(build_chain(ModelParams{0.24, 0.15}, 1), std::invalid_argument);
    // at a boundary both adjacent regimes are allowed
    const ModelParams at{0.24, boundary_epsilon(0.24, 1)};
    CHECK_NOTHROW(build_chain(at, 1));
    CHECK_NOTHROW(build_chain(at, 2));
    CHECK_THROWS_AS(build_chain(at, 3), std::invalid_argument);
}

TEST_CASE("stationary marginals against the printed values") {
    const StationaryMarginals m1 = stationary(build_chain(ModelParams{0.24, 0.05}, 1));
    CHECK(m1.alpha[0] == doctest::Approx(0.35530).epsilon(2e-5));
    CHECK(m1.beta[0] == doctest::Approx(0.14470).epsilon(2e-5));

    const StationaryMarginals m2 = stationary(build_chain(ModelParams{0.24, 0.15}, 2));
    CHECK(m2.alpha[0] == doctest::Approx(0.23903).epsilon(2e-5));
    CHECK(m2.beta[0] == doctest::Approx(0.13049).epsilon(2e-5));
    CHECK(m2.alpha[1] == doctest::Approx(0.05581).epsilon(2e-4));
    CHECK(m2.beta[1] == doctest::Approx(0.07467).epsilon(2e-5));
}

TEST_CASE("numeric solve equals the closed forms to 1e-12") {
    for (int iq = 0; iq < 6; ++iq) {
        const double q = 0.06 + 0.38 * iq / 5.0;
        for (int m = 1; m <= 2; ++m) {
            const double lo = m == 1 ? 0.0 : boundary_epsilon(q, 1);
            const double hi = boundary_epsilon(q, m);
            for (int ie = 0; ie < 6; ++ie) {
                const ModelParams par{q, lo + (hi - lo) * (ie + 0.5) / 6.0};
                const StationaryMarginals got = stationary(build_chain(par, m));
                const StationaryMarginals want =
                    m == 1 ? closed_form_m1(par) : closed_form_m2(par);
                for (int i = 0; i < m; ++i) {
                    CHECK(std::abs(got.alpha[i] - want.alpha[i]) <= 1e-12);
                    CHECK(std::abs(got.beta[i] - want.beta[i]) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("closed forms normalize to one half") {
    for (double q : {0.1, 0.24, 0.4}) {
        for (double eps : {0.05, 0.2, 0.35, 0.45}) {
            const ModelParams par{q, eps};
            CHECK(closed_form_m1(par).half_sum() == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(closed_form_m2(par).half_sum() == doctest::Approx(0.5).epsilon(1e-14));
        }
    }
    const StationaryMarginals at24 = closed_form_m2(ModelParams{0.24, 0.24});
    CHECK(at24.alpha[1] == doctest::Approx(0.068641).epsilon(2e-5));
    CHECK(at24.beta[1] == doctest::Approx(0.077562).epsilon(2e-5));
    CHECK(at24.alpha[1] + at24.beta[1] == doctest::Approx(0.146203).epsilon(1e-5));
}

TEST_CASE("observables in the first two regimes") {
    const ModelParams p1{0.24, 0.05};
    const Observables o1 = observables(stationary(build_chain(p1, 1)), couplings(p1));
    CHECK(o1.v == 1.0);
    CHECK(o1.theta == 0.0);
    CHECK(o1.c == doctest::Approx(0.4212).epsilon(1e-10));
    CHECK(o1.c ==
          doctest::Approx((1 - 2 * p1.q) * (1 - 2 * p1.epsilon) * (1 - 2 * p1.epsilon))
              .epsilon(1e-12));

    const ModelParams p2{0.24, 0.15};
    const Observables o2 = observables(stationary(build_chain(p2, 2)), couplings(p2));
    CHECK(o2.c == doctest::Approx(0.70132).epsilon(1e-5));
    CHECK(o2.v == doctest::Approx(0.77674).epsilon(1e-5));
    CHECK(o2.theta / std::numbers::ln2 == doctest::Approx(0.05581).epsilon(2e-4));
    CHECK(o2.f == doctest::Approx(-1.077866).epsilon(1e-5));
}

TEST_CASE("entropy is nonnegative and vanishes only in regime one") {
    for (double eps : {0.02, 0.07, 0.12, 0.2, 0.28, 0.34, 0.41}) {
        const ModelParams par{0.24, eps};
        const RegimeIndex reg = regime_index(couplings(par));
        const Observables obs =
            observables(stationary(build_chain(par, reg.m)), couplings(par));
        CHECK(obs.theta >= 0.0);
        if (reg.m == 1) CHECK(obs.theta == 0.0);
        if (reg.m >= 2) CHECK(obs.theta > 0.0);
        CHECK(obs.v >= 0.0);
        CHECK(obs.v <= 1.0);
        CHECK(std::abs(obs.c) <= 1.0);
    }
}

TEST_CASE("noise limits") {
    // eps -> 0: v = 1 and c -> 1 - 2q
    const ModelParams weak{0.24, 1e-4};
    const Observables ow = observables(stationary(build_chain(weak, 1)), couplings(weak));
    CHECK(ow.v == 1.0);
    CHECK(ow.c == doctest::Approx(0.52).epsilon(2e-3));

    // eps -> 1/2 (h -> 0): v sinks toward 0, c climbs toward sign(J) = 1
    double prev_v = 2.0, prev_c = -1.0;
    for (double eps : {0.30, 0.36, 0.42, 0.46, 0.48}) {
        const ModelParams par{0.24, eps};
        const RegimeIndex reg = regime_index(couplings(par));
        const Observables obs =
            observables(stationary(build_chain(par, reg.m)), couplings(par));
        CHECK(obs.v < prev_v);
        CHECK(obs.c > prev_c);
        prev_v = obs.v;
        prev_c = obs.c;
    }
    CHECK(prev_v < 0.1);
    CHECK(prev_c > 0.99);
}

TEST_CASE("power iteration agrees with the dense solve") {
    const ModelParams par{0.24, 0.34}; // m = 4
    const CompositeChain chain = build_chain(par, 4);
    const StationaryMarginals dense = stationary(chain, StationaryMethod::Dense);
    const StationaryMarginals power = stationary(chain, StationaryMethod::Power);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(dense.alpha[i] - power.alpha[i]) <= 1e-10);
        CHECK(std::abs(dense.beta[i] - power.beta[i]) <= 1e-10);
    }

    // large m goes through the fallback automatically
    const ModelParams deep{0.24, 0.488};
    const RegimeIndex reg = regime_index(couplings(deep));
    REQUIRE(8 * reg.m > 256);
    const StationaryMarginals marg = stationary(build_chain(deep, reg.m));
    CHECK(marg.half_sum() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("continuity across the first boundaries") {
    for (double q : {0.1, 0.24, 0.4}) {
        for (int m = 1; m <= 4; ++m) {
            const ContinuityReport rep = continuity_checks(ModelParams{q, 0.2}, m);
            CHECK(rep.ok);
        }
    }
    const ContinuityReport r1 = continuity_checks(ModelParams{0.24, 0.2}, 1);
    CHECK(r1.alpha1_low == doctest::Approx(0.33712).epsilon(3e-5));
    CHECK(r1.theta_low == doctest::Approx(0.16288).epsilon(3e-5));
}
