#include "bshmm/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bshmm {

namespace {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// 2x2 channel-weighted transition blocks over the hidden spin, index 0 = +1:
//   P(z', z) = pi(+1 | z') p(z' | z),  M(z', z) = pi(-1 | z') p(z' | z).
// P + M is the bare transition matrix of the hidden chain.
Matrix2d p_block(const ModelParams& par) {
    Matrix2d P;
    P << (1 - par.epsilon) * (1 - par.q), (1 - par.epsilon) * par.q,
         par.epsilon * par.q,             par.epsilon * (1 - par.q);
    return P;
}

Matrix2d m_block(const ModelParams& par) {
    Matrix2d M;
    M << par.epsilon * (1 - par.q),       par.epsilon * par.q,
         (1 - par.epsilon) * par.q,       (1 - par.epsilon) * (1 - par.q);
    return M;
}

// m x m structural patterns for the field-index moves, W-entry orientation
// (dest, src).  raise: i -> i+1 (descent along the b chain), lower: i+1 -> i
// (ascent along the a chain), first: 1 -> 1, wrap: m -> 1.
MatrixXd pat_raise(int m) {
    MatrixXd B = MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) B(i + 1, i) = 1.0;
    return B;
}

MatrixXd pat_lower(int m) {
    MatrixXd B = MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) B(i, i + 1) = 1.0;
    return B;
}

MatrixXd pat_first(int m) {
    MatrixXd B = MatrixXd::Zero(m, m);
    B(0, 0) = 1.0;
    return B;
}

MatrixXd pat_wrap(int m) {
    MatrixXd B = MatrixXd::Zero(m, m);
    B(0, m - 1) = 1.0;
    return B;
}

MatrixXd four_blocks(const MatrixXd& tl, const MatrixXd& tr, const MatrixXd& bl,
                     const MatrixXd& br) {
    const auto rows = tl.rows() + bl.rows();
    const auto cols = tl.cols() + tr.cols();
    MatrixXd out(rows, cols);
    out << tl, tr, bl, br;
    return out;
}

MatrixXd kron(const MatrixXd& A, const MatrixXd& B) {
    MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

void check_column_stochastic(const MatrixXd& W) {
    for (int j = 0; j < W.cols(); ++j) {
        const double s = W.col(j).sum();
        if (std::abs(s - 1.0) > 1e-14)
            throw std::logic_error("composite chain matrix is not column stochastic");
    }
}

double pi_of(const ModelParams& par, int y, int z) {
    return y == z ? 1.0 - par.epsilon : par.epsilon;
}

double p_of(const ModelParams& par, int znew, int zold) {
    return znew == zold ? 1.0 - par.q : par.q;
}

VectorXd stationary_vector(const MatrixXd& W, StationaryMethod method) {
    const auto n = W.rows();
    const bool dense = method == StationaryMethod::Dense ||
                       (method == StationaryMethod::Auto && n <= 256);
    if (dense) {
        MatrixXd A = W - MatrixXd::Identity(n, n);
        A.row(n - 1).setOnes();
        VectorXd rhs = VectorXd::Zero(n);
        rhs(n - 1) = 1.0;
        Eigen::PartialPivLU<MatrixXd> lu(A);
        VectorXd w = lu.solve(rhs);
        for (int pass = 0; pass < 2; ++pass) { // iterative refinement
            const VectorXd resid = rhs - A * w;
            w += lu.solve(resid);
        }
        return w;
    }

    VectorXd w = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    VectorXd next(n);
    for (long iter = 0; iter < 200000; ++iter) {
        next.noalias() = W * w;
        next /= next.sum();
        const double delta = (next - w).cwiseAbs().maxCoeff();
        w.swap(next);
        if (delta < 1e-15) return w;
    }
    throw std::runtime_error("power iteration for the stationary vector did not converge");
}

} // namespace

double StationaryMarginals::half_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) s += alpha[i] + beta[i];
    return s;
}

int chain_state_index(Family family, int i, int z, int m) {
    int l = 0, r = 0;
    switch (family) {
        case Family::A:    l = 0; r = 0; break;
        case Family::B:    l = 1; r = 0; break;
        case Family::ABar: l = 0; r = 1; break;
        case Family::BBar: l = 1; r = 1; break;
    }
    const int zi = z > 0 ? 0 : 1;
    const int p = 2 * l + zi;
    const int qq = r * m + (i - 1);
    return p * 2 * m + qq;
}

CompositeChain build_chain_structured(const ModelParams& params, int m) {
    validate(params);
    if (m < 1) throw std::invalid_argument("regime index m must be >= 1");

    const Matrix2d P = p_block(params);
    const Matrix2d M = m_block(params);
    const Matrix2d Z = Matrix2d::Zero();

    const MatrixXd R = pat_lower(m); // a_{i+1} -> a_i
    const MatrixXd D = pat_raise(m); // b_i -> b_{i+1}
    const MatrixXd E = pat_first(m);
    const MatrixXd S = pat_wrap(m);
    const MatrixXd O = MatrixXd::Zero(m, m);

    // Left factors: 4x4 over (family half, hidden spin).  Column block picks
    // the source half, the M/P rows pick the observation of the destination.
    const MatrixXd srcL_MP = four_blocks(M, Z, P, Z);
    const MatrixXd srcR_PM = four_blocks(Z, P, Z, M);
    const MatrixXd srcR_MP = four_blocks(Z, M, Z, P);
    const MatrixXd srcL_PM = four_blocks(P, Z, M, Z);

    MatrixXd W = MatrixXd::Zero(8 * m, 8 * m);
    W += kron(srcL_MP, four_blocks(O, O, O, E));  // abar_1 self block
    W += kron(srcR_PM, four_blocks(D, O, O, O));  // b_i -> {a,b}_{i+1}
    W += kron(srcR_MP, four_blocks(O, O, S, D));  // b_m wrap, bbar_i descent
    W += kron(srcL_PM, four_blocks(R, O, O, O));  // a_{i+1} -> {a,b}_i
    W += kron(srcL_MP, four_blocks(O, O, O, R));  // abar_{i+1} -> {abar,bbar}_i
    W += kron(srcL_PM, four_blocks(E, O, O, O));  // a_1 self block
    W += kron(srcR_PM, four_blocks(O, S, O, O));  // bbar_m wrap

    check_column_stochastic(W);
    return CompositeChain{m, params, couplings(params), std::move(W)};
}

CompositeChain build_chain_closure(const ModelParams& params) {
    const Couplings c = couplings(params);
    const StateSets sets = discover_states(c);
    const int m = sets.m;

    MatrixXd W = MatrixXd::Zero(8 * m, 8 * m);
    for (const XiState& src : sets.recurrent) {
        const RecurrentId sid = *classify_recurrent(src, m);
        for (int z : {+1, -1}) {
            const int col = chain_state_index(sid.family, sid.i, z, m);
            for (int y : {+1, -1}) {
                const XiState dst = step_state(src, y, c);
                const auto did = classify_recurrent(dst, m);
                if (!did)
                    throw std::logic_error("closure left the recurrent set");
                for (int znew : {+1, -1}) {
                    const int row = chain_state_index(did->family, did->i, znew, m);
                    W(row, col) += p_of(params, znew, z) * pi_of(params, y, znew);
                }
            }
        }
    }

    check_column_stochastic(W);
    return CompositeChain{m, params, c, std::move(W)};
}

CompositeChain build_chain(const ModelParams& params, int m) {
    const RegimeIndex reg = regime_index(couplings(params));
    if (reg.on_boundary) {
        if (m != reg.boundary_m && m != reg.boundary_m + 1)
            throw std::invalid_argument(
                "m must be one of the two regimes adjacent to the boundary");
    } else if (m != reg.m) {
        throw std::invalid_argument("m does not match the couplings regime");
    }
    return build_chain_structured(params, m);
}

Eigen::VectorXd stationary_raw(const CompositeChain& chain, StationaryMethod method) {
    VectorXd w = stationary_vector(chain.W, method);
    if (!(std::abs(w.sum() - 1.0) < 1e-9))
        throw std::runtime_error("stationary solve failed to normalize");
    return w;
}

StationaryMarginals stationary(const CompositeChain& chain, StationaryMethod method) {
    const VectorXd w = stationary_raw(chain, method);
    const int m = chain.m;

    StationaryMarginals marg;
    marg.alpha.resize(static_cast<std::size_t>(m));
    marg.beta.resize(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        double a = 0.0, b = 0.0;
        for (int z : {+1, -1}) {
            a += w(chain_state_index(Family::A, i, z, m));
            a += w(chain_state_index(Family::ABar, i, z, m));
            b += w(chain_state_index(Family::B, i, z, m));
            b += w(chain_state_index(Family::BBar, i, z, m));
        }
        marg.alpha[static_cast<std::size_t>(i - 1)] = a / 2.0;
        marg.beta[static_cast<std::size_t>(i - 1)] = b / 2.0;
    }
    return marg;
}

Observables observables(const StationaryMarginals& marg, const Couplings& c,
                        bool at_boundary) {
    const int m = marg.m();
    if (m < 1) throw std::invalid_argument("empty marginals");
    const double alpha1 = marg.alpha.front();
    const double beta_m = marg.beta.back();

    Observables obs;
    obs.f = -2.0 * (c.h * (alpha1 + m * beta_m) + c.J * (0.5 - 2.0 * beta_m));
    obs.c = 1.0 - 4.0 * beta_m;
    // normalization pins the overlap at one in the observation-dominated regime
    obs.v = m == 1 ? 1.0 : 2.0 * alpha1 + 2.0 * m * beta_m;
    double frustrated = m >= 2 ? marg.alpha[1] : 0.0;
    if (at_boundary) frustrated += beta_m;
    obs.theta = std::max(0.0, std::numbers::ln2 * frustrated);
    return obs;
}

StationaryMarginals closed_form_m1(const ModelParams& params) {
    validate(params);
    const double q = params.q, e = params.epsilon;
    const double g = e * (1.0 - e);
    StationaryMarginals marg;
    marg.alpha = {(1.0 - q) / 2.0 + g * (2.0 * q - 1.0)};
    marg.beta = {q / 2.0 - g * (2.0 * q - 1.0)};
    return marg;
}

StationaryMarginals closed_form_m2(const ModelParams& params) {
    validate(params);
    const double g = params.epsilon * (1.0 - params.epsilon);
    const double u = 1.0 - 2.0 * params.q;
    const double den = 3.0 - (1.0 + 2.0 * g) * u;

    StationaryMarginals marg;
    marg.alpha.resize(2);
    marg.beta.resize(2);
    marg.alpha[0] = (0.5 + (0.5 - 3.0 * g) * u) / den;
    marg.beta[0] = (0.5 + (g - 0.5) * u) / den;
    marg.alpha[1] = (0.25 + 0.5 * (3.0 * g - 1.0) * u +
                     0.25 * (1.0 - 2.0 * g * (4.0 * g + 1.0)) * u * u) /
                    den;
    marg.beta[1] = (0.25 - 0.5 * g * u + 0.25 * (8.0 * g * g + 2.0 * g - 1.0) * u * u) / den;
    return marg;
}

ContinuityReport continuity_checks(const ModelParams& params, int m, double tol) {
    if (m < 1) throw std::invalid_argument("regime index m must be >= 1");
    const double eps_star = boundary_epsilon(params.q, m);
    const ModelParams at{params.q, eps_star};
    const Couplings c = couplings(at);

    const StationaryMarginals low = stationary(build_chain_structured(at, m));
    const StationaryMarginals high = stationary(build_chain_structured(at, m + 1));

    ContinuityReport rep;
    rep.eps_star = eps_star;
    rep.f_low = observables(low, c).f;
    rep.f_high = observables(high, c).f;
    rep.alpha1_low = low.alpha[0];
    rep.alpha1_high = high.alpha[0] + high.beta[static_cast<std::size_t>(m)];
    rep.theta_low = (m >= 2 ? low.alpha[1] : 0.0) + low.beta[static_cast<std::size_t>(m - 1)];
    rep.theta_high = high.alpha[1] + high.beta[static_cast<std::size_t>(m - 1)];

    rep.ok = std::abs(rep.f_low - rep.f_high) <= tol &&
             std::abs(rep.alpha1_low - rep.alpha1_high) <= tol &&
             std::abs(rep.theta_low - rep.theta_high) <= tol;
    if (!rep.ok) {
        std::ostringstream os;
        os.precision(15);
        os << "q=" << params.q << " m=" << m << " eps*=" << eps_star
           << " f: " << rep.f_low << " vs " << rep.f_high
           << "; alpha1: " << rep.alpha1_low << " vs " << rep.alpha1_high
           << "; theta-sum: " << rep.theta_low << " vs " << rep.theta_high;
        rep.details = os.str();
    }
    return rep;
}

} // namespace bshmm
