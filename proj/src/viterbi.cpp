#include "bshmm/viterbi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bshmm {

namespace {

constexpr int kSpin[2] = {+1, -1};

struct Node {
    LatticeEnergy pt; // lattice point of the preferred (witness) prefix
    mpz_class count;
    mpz_class sum_a;
    mpz_class sum_b;
};

struct Tables {
    std::vector<std::array<LatticeEnergy, 2>>* lattice = nullptr;
    std::vector<std::array<mpz_class, 2>>* counts = nullptr;
};

// One DP sweep.  backptr[k][s] is the predecessor spin index the witness
// follows out of site k with terminal spin s (ties resolve to +1).
template <class Cmp>
std::array<Node, 2> forward_pass(const SpinSequence& y, const Cmp& cmp,
                                 std::vector<std::array<signed char, 2>>& backptr,
                                 const Tables& tab) {
    const std::size_t n = y.size();
    backptr.assign(n, {0, 0});

    std::array<Node, 2> prev, cur;
    for (int si = 0; si < 2; ++si) {
        prev[si].pt = LatticeEnergy{0, static_cast<long long>(y[0]) * kSpin[si]};
        prev[si].count = 1;
        prev[si].sum_a = 0;
        prev[si].sum_b = y[0] * kSpin[si];
    }
    if (tab.lattice) {
        tab.lattice->push_back({prev[0].pt, prev[1].pt});
        tab.counts->push_back({prev[0].count, prev[1].count});
    }

    for (std::size_t k = 1; k < n; ++k) {
        const int yk = y[k];
        for (int si = 0; si < 2; ++si) {
            const int s = kSpin[si];
            const long long db = static_cast<long long>(yk) * s;
            LatticeEnergy cand[2];
            for (int pi = 0; pi < 2; ++pi) {
                cand[pi] = prev[pi].pt;
                cand[pi].a += static_cast<long long>(s) * kSpin[pi];
                cand[pi].b += db;
            }
            const int order = cmp(cand[0], cand[1]);
            Node& out = cur[si];
            if (order != 0) {
                const int pi = order > 0 ? 0 : 1;
                out.pt = cand[pi];
                out.count = prev[pi].count;
                // interaction increment s * s' is +-1, so totals shift by count
                out.sum_a = prev[pi].sum_a;
                if (s * kSpin[pi] > 0) out.sum_a += prev[pi].count; else out.sum_a -= prev[pi].count;
                out.sum_b = prev[pi].sum_b;
                if (db > 0) out.sum_b += prev[pi].count; else out.sum_b -= prev[pi].count;
                backptr[k][si] = static_cast<signed char>(pi);
            } else {
                out.pt = cand[0]; // prefer the +1 branch as representative
                out.count = prev[0].count + prev[1].count;
                out.sum_a = prev[0].sum_a + prev[1].sum_a;
                if (s > 0) { out.sum_a += prev[0].count; out.sum_a -= prev[1].count; }
                else       { out.sum_a -= prev[0].count; out.sum_a += prev[1].count; }
                out.sum_b = prev[0].sum_b + prev[1].sum_b;
                if (db > 0) out.sum_b += out.count; else out.sum_b -= out.count;
                backptr[k][si] = 0;
            }
        }
        std::swap(prev[0], cur[0]);
        std::swap(prev[1], cur[1]);
        if (tab.lattice) {
            tab.lattice->push_back({prev[0].pt, prev[1].pt});
            tab.counts->push_back({prev[0].count, prev[1].count});
        }
    }
    return prev;
}

template <class Cmp>
DecodeResult finish(const SpinSequence& y, const Cmp& cmp,
                    const std::array<Node, 2>& fin,
                    const std::vector<std::array<signed char, 2>>& backptr) {
    const std::size_t n = y.size();
    const int order = cmp(fin[0].pt, fin[1].pt);

    DecodeResult r;
    int terminal;
    if (order != 0) {
        terminal = order > 0 ? 0 : 1;
        r.count = fin[terminal].count;
        r.sum_xx = fin[terminal].sum_a;
        r.sum_xy = fin[terminal].sum_b;
    } else {
        terminal = 0;
        r.count = fin[0].count + fin[1].count;
        r.sum_xx = fin[0].sum_a + fin[1].sum_a;
        r.sum_xy = fin[0].sum_b + fin[1].sum_b;
    }

    r.witness.resize(n);
    int si = terminal;
    for (std::size_t k = n; k-- > 0;) {
        r.witness[k] = static_cast<Spin>(kSpin[si]);
        if (k > 0) si = backptr[k][si];
    }

    long long a = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 < n) a += static_cast<long long>(r.witness[k]) * r.witness[k + 1];
        b += static_cast<long long>(y[k]) * r.witness[k];
    }
    r.energy = LatticeEnergy{a, b};
    if (r.energy != fin[terminal].pt)
        throw std::logic_error("witness does not reproduce the DP lattice point");
    return r;
}

template <class Cmp>
DecodeResult decode_with(const SpinSequence& y, const Cmp& cmp, const Tables& tab) {
    std::vector<std::array<signed char, 2>> backptr;
    const auto fin = forward_pass(y, cmp, backptr, tab);
    return finish(y, cmp, fin, backptr);
}

void check_input(const SpinSequence& y, const Couplings& c, const ComparisonMode& mode) {
    if (y.empty()) throw std::invalid_argument("observation sequence must be non-empty");
    if (!(c.J > 0.0) || !(c.h > 0.0))
        throw std::invalid_argument("decode requires J > 0 and h > 0");
    if (const auto* com = std::get_if<Commensurate>(&mode)) {
        if (com->m < 1) throw std::invalid_argument("Commensurate mode needs m >= 1");
        if (std::abs(c.h - 2.0 * c.J / com->m) > 1e-9 * c.h)
            throw std::invalid_argument("Commensurate(m) requires h = 2J/m");
    }
}

DecodeResult dispatch(const SpinSequence& y, const Couplings& c,
                      const ComparisonMode& mode, const Tables& tab) {
    check_input(y, c, mode);
    if (const auto* inc = std::get_if<Incommensurate>(&mode))
        return decode_with(y, IncommensurateCompare{c.J, c.h, inc->guard}, tab);
    const auto& com = std::get<Commensurate>(mode);
    return decode_with(y, CommensurateCompare{com.m}, tab);
}

// Uniform mpz below bound (rejection on the top bits).
mpz_class mpz_below(const mpz_class& bound, SplitMix64& rng) {
    if (bound <= 1) return 0;
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    const std::size_t words = (bits + 63) / 64;
    std::vector<std::uint64_t> buf(words);
    mpz_class r;
    while (true) {
        for (auto& w : buf) w = rng.next();
        const std::size_t top = bits % 64;
        if (top != 0) buf.back() &= (std::uint64_t{1} << top) - 1;
        mpz_import(r.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
        if (r < bound) return r;
    }
}

} // namespace

DecodeResult decode_count(const SpinSequence& y, const Couplings& c,
                          const ComparisonMode& mode) {
    return dispatch(y, c, mode, Tables{});
}

namespace {

// num / den as a double without materializing the quotient; den > 0.
double mpz_ratio(const mpz_class& num, const mpz_class& den) {
    if (num == 0) return 0.0;
    signed long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
    const double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
    return (mn / md) * std::ldexp(1.0, static_cast<int>(en - ed));
}

} // namespace

DecodeStats stats_from(const DecodeResult& r, std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    DecodeStats s;
    const mpz_class nn(static_cast<unsigned long>(n));
    s.v_hat = mpz_ratio(r.sum_xy, r.count * nn);
    s.c_hat = n > 1 ? mpz_ratio(r.sum_xx, r.count * (nn - 1)) : 0.0;
    signed long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, r.count.get_mpz_t());
    s.theta_hat = (std::log(mant) + static_cast<double>(exp2) * std::numbers::ln2) /
                  static_cast<double>(n);
    return s;
}

DecodeStats decode_stats(const SpinSequence& y, const Couplings& c,
                         const ComparisonMode& mode) {
    return stats_from(decode_count(y, c, mode), y.size());
}

double error_rate(const SpinSequence& x_true, const DecodeResult& r) {
    if (x_true.size() != r.witness.size())
        throw std::invalid_argument("sequence lengths differ");
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < x_true.size(); ++k)
        if (x_true[k] != r.witness[k]) ++mismatches;
    return static_cast<double>(mismatches) / static_cast<double>(x_true.size());
}

OptimumSampler::OptimumSampler(const SpinSequence& y, const Couplings& c,
                               const ComparisonMode& mode)
    : y_(y), c_(c), mode_(mode) {
    Tables tab{&lattice_, &counts_};
    result_ = dispatch(y_, c_, mode_, tab);
}

SpinSequence OptimumSampler::sample(SplitMix64& rng) const {
    const std::size_t n = y_.size();
    SpinSequence path(n);

    // order is the three-way comparison of branch 0 vs branch 1; on a tie the
    // branch is drawn with probability proportional to its prefix count
    const auto pick = [&](const mpz_class& w0, const mpz_class& w1, int order) -> int {
        if (order > 0) return 0;
        if (order < 0) return 1;
        const mpz_class total = w0 + w1;
        return mpz_below(total, rng) < w0 ? 0 : 1;
    };

    const auto cmp3 = [&](const LatticeEnergy& p, const LatticeEnergy& q) -> int {
        if (const auto* inc = std::get_if<Incommensurate>(&mode_))
            return IncommensurateCompare{c_.J, c_.h, inc->guard}(p, q);
        return CommensurateCompare{std::get<Commensurate>(mode_).m}(p, q);
    };

    const auto& last = lattice_.back();
    int si = pick(counts_.back()[0], counts_.back()[1], cmp3(last[0], last[1]));
    LatticeEnergy target = lattice_.back()[si];

    for (std::size_t k = n; k-- > 0;) {
        path[k] = static_cast<Spin>(kSpin[si]);
        if (k == 0) break;
        const int s = kSpin[si];
        const long long db = static_cast<long long>(y_[k]) * s;
        LatticeEnergy cand[2];
        bool valid[2];
        for (int pi = 0; pi < 2; ++pi) {
            cand[pi] = lattice_[k - 1][pi];
            cand[pi].a += static_cast<long long>(s) * kSpin[pi];
            cand[pi].b += db;
            valid[pi] = cmp3(cand[pi], target) == 0;
        }
        int next;
        if (valid[0] && valid[1])
            next = pick(counts_[k - 1][0], counts_[k - 1][1], 0);
        else if (valid[0])
            next = 0;
        else if (valid[1])
            next = 1;
        else
            throw std::logic_error("backward sampling lost the optimal value");
        si = next;
        target = lattice_[k - 1][si];
    }
    return path;
}

} // namespace bshmm
