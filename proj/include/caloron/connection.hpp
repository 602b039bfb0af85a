#pragma once

#include "caloron/greens.hpp"

namespace caloron {

enum class DerivativeMethod { fd, integral };
enum class ChiDerivative { sylvester, fd };

DerivativeMethod parse_derivative_method(const std::string& name);

struct ConnectionOptions {
    double h = 1e-4;            // finite-difference step in t
    double tol = default_ode_tol;
    DerivativeMethod method = DerivativeMethod::fd;
    ChiDerivative chi_method = ChiDerivative::sylvester;
    bool richardson = false;    // Richardson-extrapolate the central differences
    bool check_regularity = true;
    double quad_tol = 1e-10;    // for the integral method
};

struct Chi {
    Matrix chi;              // hermitian positive square root of id - Q^dag F Q
    Matrix boundary_form;    // id - Q^dag F Q
    double min_eigenvalue = 0.0;
};

/// chi = (id - Q^dag F Q)^{1/2}, the hermitian positive root. Throws
/// NotPositiveDefinite when id - Q^dag F Q has a non-positive eigenvalue.
Chi chi_from_boundary(const NahmData& data, const BoundaryGreens& bg);
Chi chi(const NahmData& data, const FourPoint& t, double tol = default_ode_tol);

/// Solves chi X + X chi = rhs for hermitian positive chi.
Matrix sylvester_sqrt_derivative(const Matrix& chi, const Matrix& rhs);

/// d F(lambda_beta, lambda_alpha) / d t_nu for all (beta, alpha).
BlockMatrix dF_boundary(const NahmData& data, const FourPoint& t, int nu,
                        const ConnectionOptions& options = {});

struct GaugePotential {
    FourPoint t;
    std::array<Matrix, 4> A;
    double chi_min_eigenvalue = 0.0;

    double antihermiticity_defect() const;
};

/// A_mu = -1/4 sum_nu chi^{-1} Q^dag (e_bracket(nu, mu) (x) dF_nu) Q chi^{-1}
///        + 1/2 (chi^{-1} d_mu chi - d_mu chi chi^{-1}).
GaugePotential gauge_potential(const NahmData& data, const FourPoint& t,
                               const ConnectionOptions& options = {});

struct Curvature {
    FourPoint t;
    double h = 0.0;
    std::array<std::array<Matrix, 4>, 4> F;

    /// sum_{mu,nu} Re tr(F_{mu nu} F_{mu nu}), gauge invariant
    double trace_square() const;
    /// sum eps_{mu nu rho sigma} Re tr(F_{mu nu} F_{rho sigma})
    double topological_density() const;
};

/// F_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu] with central differences of step h.
Curvature curvature(const NahmData& data, const FourPoint& t, double h,
                    const ConnectionOptions& options = {});

struct SelfDualResidual {
    double residual = 0.0;
    int orientation = 1;  // +1 self-dual, -1 anti-self-dual
};

SelfDualResidual selfdual_residual(const Curvature& curvature);
SelfDualResidual selfdual_residual(const NahmData& data, const FourPoint& t, double h,
                                   const ConnectionOptions& options = {});

} // namespace caloron
