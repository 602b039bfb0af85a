#pragma once

#include <cstdint>

#include "caloron/connection.hpp"

namespace caloron {

// --- free field ------------------------------------------------------------

/// (1/2pi) sum_m e^{im(x-y)} / (m^2 + r^2) in closed form.
double free_field_F(double r, double x, double y);
/// The same series truncated to |m| <= modes.
double free_field_fourier_sum(double r, double x, double y, int modes);

// --- dense discretization ----------------------------------------------------

/// Periodic second-order difference discretization of the operator whose
/// Green's function is F: covariant links exp(-i h A) at half-nodes, V at
/// nodes, the point terms as (1/h)-weighted diagonal insertions at the nodes
/// carrying the marked points.
struct DenseOperator {
    int N = 0;
    double h = 0.0;
    int section_dim = 0;
    std::vector<int> marked_nodes;  // node of each lambda_alpha
    Matrix matrix;                  // (section_dim N) x (section_dim N)

    double hermiticity_defect() const;
};

DenseOperator dense_operator(const NahmData& data, const FourPoint& t, int N);

/// F(lambda_beta, lambda_alpha) from the inverse of the dense operator.
BoundaryGreens dense_greens(const NahmData& data, const FourPoint& t, int N);

// --- classical path through the zero modes ------------------------------------

/// psi(s) = -sum_alpha B(s, lambda_alpha) Q_alpha chi_alpha, with chi the hermitian
/// root and chi_alpha its row block alpha.
class ZeroModes {
public:
    ZeroModes(const NahmData& data, const FourPoint& t, double tol = default_ode_tol);

    const FourPoint& point() const { return t_; }
    const Matrix& chi() const { return chi_; }
    /// 2k x N matrix whose columns are the zero modes at s.
    Matrix psi(double s) const;
    /// int psi^dag psi ds + chi^dag chi, interval by interval.
    Matrix gram(double quad_tol = 1e-8) const;
    double gram_defect(double quad_tol = 1e-8) const;

private:
    NahmData data_;
    FourPoint t_;
    double tol_;
    Matrix chi_;
    std::vector<Matrix> source_;  // i (iota_alpha - id)^{-1} Q_alpha chi_alpha
};

/// A_mu = int psi^dag d_mu psi ds + chi^dag d_mu chi, central differences of step h.
GaugePotential classical_gauge_potential(const NahmData& data, const FourPoint& t, double h = 1e-4,
                                         double quad_tol = 1e-8, double tol = default_ode_tol);

// --- reference data ---------------------------------------------------------

/// Spinor q with -(1/2) q^dag sigma q = v, i.e. the boundary datum producing the jump v.
Eigen::Vector2cd spinor_for_jump(const Eigen::Vector3d& v);

/// k = 1, n = 2 caloron data: jumps m_alpha n_alpha at lambda_alpha, T_0 = 0,
/// piecewise-constant T with zero mean on the circle.
NahmData su2_reference_data(double m1, double m2, const Eigen::Vector3d& n1,
                            const Eigen::Vector3d& n2, double lambda1, double lambda2);
/// Jumps of magnitude 1 along +z and -z at pi/2 and 3pi/2.
NahmData reference_dataset();

/// k = 1, T = 0 and a single zero boundary column at lambda.
NahmData free_data(double lambda = 0.0);

struct RandomDataOptions {
    int k = 2;
    int n = 3;
    bool gauge_twist = true;  // apply an s-dependent periodic gauge transformation
    double jump_scale = 1.0;
    int degree = 24;          // Chebyshev degree for the twisted data
};

/// Random Nahm data satisfying the Nahm equations and matching conditions:
/// commuting piecewise-constant data, conjugated by a random unitary and
/// optionally by g(s) = exp(i phi(s) H) with integer-spectrum H. Deterministic
/// in the seed.
NahmData random_nahm_data(std::uint64_t seed, const RandomDataOptions& options = {});

/// Applies g(s) = exp(i phi(s) H), phi piecewise linear with phi(lambda_0) = 0 and
/// total increase 2 pi, to data; H must have integer eigenvalues.
NahmData gauge_transform(const NahmData& data, const Matrix& H, const std::vector<double>& phi_at_lambda,
                         int degree = 24);

} // namespace caloron
