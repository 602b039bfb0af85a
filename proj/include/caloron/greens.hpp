#pragma once

#include <vector>

#include "caloron/ode_monodromy.hpp"

namespace caloron {

using BlockMatrix = std::vector<std::vector<Matrix>>;  // [beta][alpha]

/// Largest condition number of (iota - id) accepted before a point is
/// declared irregular.
inline constexpr double max_resolvent_condition = 1e12;

/// Values at the marked points of the Green's matrices of 𝒟†𝒟 (F, k x k
/// blocks) and optionally D†D (G, 2k x 2k blocks).
struct BoundaryGreens {
    FourPoint t;
    BlockMatrix F;
    BlockMatrix G;                  // empty unless requested
    double diagonal_mismatch = 0.0; // max |left limit - right limit| of F(lambda_a, lambda_a)
    double condition = 0.0;         // largest condition number of (iota - id) encountered

    bool has_G() const { return !G.empty(); }
    Matrix F_matrix() const;  // nk x nk
    Matrix G_matrix() const;  // 2nk x 2nk
};

/// Kernel of (D^dag)^{-1}: B(x, y) = i iota_{x,y} (iota_{y+2pi,y} - id)^{-1},
/// x taken in (y, y + 2pi). D^dag B(., y) = delta(. - y), i.e. the jump
/// B(y+, y) - B(y-, y) is -i id.
Matrix fundamental_B(const NahmData& data, const FourPoint& t, double x, double y,
                     double tol = default_ode_tol);

/// Green's function of D^dag D (2k x 2k) and of 𝒟^dag 𝒟 restricted to E
/// (k x k): value block of iota_{x,y} (iota_{y+2pi,y} - id)^{-1} (0, id).
Matrix greens_G(const NahmData& data, const FourPoint& t, double x, double y,
                double tol = default_ode_tol);
Matrix greens_F(const NahmData& data, const FourPoint& t, double x, double y,
                double tol = default_ode_tol);

BoundaryGreens boundary_greens(const NahmData& data, const FourPoint& t,
                               double tol = default_ode_tol, bool want_G = false);

/// Solutions of a circle flow with a unit source at every marked point.
///
/// For each source alpha, X_alpha = scale * (iota_alpha - id)^{-1} E, with iota_alpha
/// the monodromy based at (lambda_alpha, right) and E = (0, id)^T for second-order
/// flows or id for first-order ones. start_state[a] holds, for all sources side by
/// side (column block alpha), the state at (lambda_a, right). On the open
/// interval a the solution is transfer(lambda_a -> s) * start_state[a].
struct MarkedSourceSolution {
    int section_dim = 0;
    std::vector<Matrix> interval_transfer;  // lambda_a -> lambda_{a+1}, without jumps
    std::vector<Matrix> start_state;        // state_dim x (n * section_dim)
    std::vector<Matrix> end_value;          // value rows at (lambda_{a+1}, left)
    double condition = 0.0;
};

MarkedSourceSolution solve_marked_sources(const CircleFlow& flow, cplx scale,
                                          double tol = default_ode_tol);

/// N x N matrix with blocks Q_beta^dag kron_spin(spin, blocks[beta][alpha]) Q_alpha.
Matrix boundary_sandwich(const NahmData& data, const Matrix2& spin, const BlockMatrix& blocks);
/// N x N matrix with blocks Q_beta^dag blocks[beta][alpha] Q_alpha (2k x 2k blocks).
Matrix boundary_sandwich(const NahmData& data, const BlockMatrix& blocks);

/// Q^dag F Q and Q^dag G Q of the boundary Green's matrices.
Matrix qfq(const NahmData& data, const BoundaryGreens& bg);
Matrix qgq(const NahmData& data, const BoundaryGreens& bg);

} // namespace caloron
