#include "caloron/greens.hpp"

#include <cmath>

#include "caloron/spin_algebra.hpp"

namespace caloron {

namespace {

constexpr double coincident_eps = 1e-12;

Matrix source_embedding(const CircleFlow& flow) {
    const int m = flow.section_dimension();
    if (!flow.second_order()) return Matrix::Identity(m, m);
    Matrix e = Matrix::Zero(2 * m, m);
    e.bottomRows(m).setIdentity();
    return e;
}

// (iota - id)^{-1} rhs, rejecting numerically singular resolvents.
Matrix solve_resolvent(const Matrix& iota, const Matrix& rhs, double* condition) {
    const Matrix shifted = iota - Matrix::Identity(iota.rows(), iota.cols());
    Eigen::PartialPivLU<Matrix> lu(shifted);
    const double rc = lu.rcond();
    const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (condition) *condition = cond;
    if (!(cond < max_resolvent_condition))
        throw IrregularPoint("monodromy has an eigenvalue at 1 (condition " + std::to_string(cond) + ")",
                             eigenvalue_gap(iota));
    return lu.solve(rhs);
}

double circle_offset(double x, double y) {
    double d = std::fmod(x - y, two_pi);
    if (d < 0.0) d += two_pi;
    return d;
}

Matrix second_order_greens(const NahmData& data, const FourPoint& t, double x, double y,
                           OperatorTag tag, double tol) {
    CircleFlow flow(data, t, tag);
    const int m = flow.section_dimension();
    const Matrix iota = flow.propagate(y, Side::right, y + two_pi, Side::right, tol);
    const Matrix X = solve_resolvent(iota, source_embedding(flow), nullptr);
    const double d = circle_offset(x, y);
    if (d < coincident_eps || two_pi - d < coincident_eps) return X.topRows(m);
    return flow.propagate(y, Side::right, y + d, Side::right, X, tol).topRows(m);
}

BlockMatrix collect_values(const NahmData& data, const MarkedSourceSolution& sol,
                           double* mismatch) {
    const int n = data.num_points();
    const int m = sol.section_dim;
    BlockMatrix out(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            const Matrix right = sol.start_state[static_cast<std::size_t>(b)].block(0, a * m, m, m);
            if (a != b) {
                out[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = right;
                continue;
            }
            const int prev = (b + n - 1) % n;
            const Matrix left = sol.end_value[static_cast<std::size_t>(prev)].block(0, a * m, m, m);
            const double diff = (left - right).cwiseAbs().maxCoeff();
            const double scale = std::max(1.0, right.cwiseAbs().maxCoeff());
            *mismatch = std::max(*mismatch, diff / scale);
            out[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 0.5 * (left + right);
        }
    }
    return out;
}

Matrix assemble(const BlockMatrix& blocks) {
    const auto n = static_cast<Eigen::Index>(blocks.size());
    const auto m = blocks[0][0].rows();
    Matrix out(n * m, n * m);
    for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index a = 0; a < n; ++a)
            out.block(b * m, a * m, m, m) = blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
    return out;
}

} // namespace

Matrix BoundaryGreens::F_matrix() const { return assemble(F); }

Matrix BoundaryGreens::G_matrix() const {
    if (G.empty()) throw ConfigError("boundary Green's matrix G was not computed");
    return assemble(G);
}

MarkedSourceSolution solve_marked_sources(const CircleFlow& flow, cplx scale, double tol) {
    const NahmData& data = flow.data();
    const int n = data.num_points();
    const int m = flow.section_dimension();
    const int d = flow.state_dimension();

    MarkedSourceSolution sol;
    sol.section_dim = m;
    std::vector<Matrix> jumps;
    for (int a = 0; a < n; ++a) {
        sol.interval_transfer.push_back(flow.interval_transfer(a, tol));
        jumps.push_back(flow.jump(a));
    }
    const auto P = [&](int a) -> const Matrix& { return sol.interval_transfer[static_cast<std::size_t>(a % n)]; };
    const auto J = [&](int a) -> const Matrix& { return jumps[static_cast<std::size_t>(a % n)]; };

    sol.start_state.assign(static_cast<std::size_t>(n), Matrix::Zero(d, n * m));
    const Matrix E = source_embedding(flow);
    for (int alpha = 0; alpha < n; ++alpha) {
        Matrix iota = Matrix::Identity(d, d);
        for (int i = 0; i < n; ++i) iota = J(alpha + i + 1) * (P(alpha + i) * iota);
        double cond = 0.0;
        Matrix state = scale * solve_resolvent(iota, E, &cond);
        sol.condition = std::max(sol.condition, cond);
        sol.start_state[static_cast<std::size_t>(alpha)].middleCols(alpha * m, m) = state;
        for (int i = 0; i + 1 < n; ++i) {
            state = J(alpha + i + 1) * (P(alpha + i) * state);
            sol.start_state[static_cast<std::size_t>((alpha + i + 1) % n)].middleCols(alpha * m, m) = state;
        }
    }
    const int value_rows = flow.second_order() ? m : d;
    for (int a = 0; a < n; ++a)
        sol.end_value.push_back((P(a) * sol.start_state[static_cast<std::size_t>(a)]).topRows(value_rows));
    return sol;
}

Matrix fundamental_B(const NahmData& data, const FourPoint& t, double x, double y, double tol) {
    const double d = circle_offset(x, y);
    if (d < coincident_eps || two_pi - d < coincident_eps)
        throw ConfigError("fundamental_B is discontinuous at x = y");
    CircleFlow flow(data, t, OperatorTag::Ddag);
    const Matrix iota = flow.propagate(y, Side::right, y + two_pi, Side::right, tol);
    if (eigenvalue_gap(iota) <= default_regularity_threshold)
        throw IrregularPoint("D^dag has a kernel at this t", eigenvalue_gap(iota));
    const Matrix X = I_unit * solve_resolvent(iota, Matrix::Identity(iota.rows(), iota.cols()), nullptr);
    return flow.propagate(y, Side::right, y + d, Side::right, X, tol);
}

Matrix greens_G(const NahmData& data, const FourPoint& t, double x, double y, double tol) {
    return second_order_greens(data, t, x, y, OperatorTag::DdagD, tol);
}

Matrix greens_F(const NahmData& data, const FourPoint& t, double x, double y, double tol) {
    return second_order_greens(data, t, x, y, OperatorTag::Finv, tol);
}

BoundaryGreens boundary_greens(const NahmData& data, const FourPoint& t, double tol, bool want_G) {
    BoundaryGreens bg;
    bg.t = t;
    const auto solF = solve_marked_sources(CircleFlow(data, t, OperatorTag::Finv), 1.0, tol);
    bg.condition = solF.condition;
    bg.F = collect_values(data, solF, &bg.diagonal_mismatch);
    if (want_G) {
        const auto solG = solve_marked_sources(CircleFlow(data, t, OperatorTag::DdagD), 1.0, tol);
        bg.condition = std::max(bg.condition, solG.condition);
        double mismatch = 0.0;
        bg.G = collect_values(data, solG, &mismatch);
        bg.diagonal_mismatch = std::max(bg.diagonal_mismatch, mismatch);
    }
    if (bg.diagonal_mismatch > 1e-8)
        throw Error("left and right limits of F(lambda, lambda) disagree by " +
                    std::to_string(bg.diagonal_mismatch));
    return bg;
}

Matrix boundary_sandwich(const NahmData& data, const Matrix2& spin, const BlockMatrix& blocks) {
    const int n = data.num_points();
    BlockMatrix lifted(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            lifted[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                kron_spin(spin, blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]);
    return boundary_sandwich(data, lifted);
}

Matrix boundary_sandwich(const NahmData& data, const BlockMatrix& blocks) {
    const int n = data.num_points();
    const int N = data.boundary_dimension();
    Matrix out = Matrix::Zero(N, N);
    for (int b = 0; b < n; ++b) {
        const Matrix& Qb = data.jump(b).Q;
        for (int a = 0; a < n; ++a) {
            const Matrix& Qa = data.jump(a).Q;
            out.block(data.boundary_offset(b), data.boundary_offset(a), Qb.cols(), Qa.cols()) =
                Qb.adjoint() * blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] * Qa;
        }
    }
    return out;
}

Matrix qfq(const NahmData& data, const BoundaryGreens& bg) {
    return boundary_sandwich(data, Matrix2::Identity(), bg.F);
}

Matrix qgq(const NahmData& data, const BoundaryGreens& bg) {
    if (!bg.has_G()) throw ConfigError("boundary Green's matrix G was not computed");
    return boundary_sandwich(data, bg.G);
}

} // namespace caloron
