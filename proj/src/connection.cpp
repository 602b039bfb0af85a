#include "caloron/connection.hpp"

#include <cmath>

#include "caloron/quadrature.hpp"
#include "caloron/spin_algebra.hpp"

namespace caloron {

namespace {

BlockMatrix combine(const BlockMatrix& a, const BlockMatrix& b, cplx wa, cplx wb) {
    BlockMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] = wa * a[i][j] + wb * b[i][j];
    return out;
}

BlockMatrix central_difference(const NahmData& data, const FourPoint& t, int nu, double h,
                               double tol) {
    const auto plus = boundary_greens(data, t.shifted(nu, h), tol).F;
    const auto minus = boundary_greens(data, t.shifted(nu, -h), tol).F;
    return combine(plus, minus, 0.5 / h, -0.5 / h);
}

BlockMatrix integral_derivative(const NahmData& data, const FourPoint& t, int nu,
                                const ConnectionOptions& opt) {
    const CircleFlow flow(data, t, OperatorTag::Finv);
    const auto sol = solve_marked_sources(flow, 1.0, opt.tol);
    const int n = data.num_points();
    const int k = data.rank();
    const Matrix id = Matrix::Identity(k, k);

    Matrix total = Matrix::Zero(n * k, n * k);
    for (int a = 0; a < n; ++a) {
        const double lo = data.interval_start(a);
        const Matrix& start = sol.start_state[static_cast<std::size_t>(a)];
        // The state is transported from lo to s for each node; F(s, lambda) is smooth on the open interval.
        auto integrand = [&](double s) -> Matrix {
            const Matrix Y = flow.propagate(lo, Side::right, s, Side::left, start, opt.tol);
            const Matrix V = Y.topRows(k);
            Matrix DV;
            if (nu == 0)
                DV = I_unit * Y.bottomRows(k) + (data.T_on(a, 0, s) + t[0] * id) * V;
            else
                DV = (data.T_on(a, nu, s) + t[nu] * id) * V;
            return -2.0 * V.adjoint() * DV;
        };
        total += integrate(integrand, lo, data.interval_end(a), opt.quad_tol).value;
    }
    BlockMatrix out(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            out[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = total.block(b * k, a * k, k, k);
    return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// dF[beta][alpha]^dag = dF[alpha][beta] holds exactly; drop the roundoff part.
BlockMatrix hermitian_blocks(const BlockMatrix& m) {
    BlockMatrix out = m;
    for (std::size_t b = 0; b < m.size(); ++b)
        for (std::size_t a = 0; a < m.size(); ++a) out[b][a] = 0.5 * (m[b][a] + m[a][b].adjoint());
    return out;
}

} // namespace

DerivativeMethod parse_derivative_method(const std::string& name) {
    if (name == "fd") return DerivativeMethod::fd;
    if (name == "integral") return DerivativeMethod::integral;
    throw ConfigError("unknown derivative method: " + name);
}

Chi chi_from_boundary(const NahmData& data, const BoundaryGreens& bg) {
    const int N = data.boundary_dimension();
    Chi out;
    Matrix form = Matrix::Identity(N, N) - qfq(data, bg);
    out.boundary_form = 0.5 * (form + form.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(out.boundary_form);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    if (!(out.min_eigenvalue > 0.0))
        throw NotPositiveDefinite("id - Q^dag F Q is not positive definite (smallest eigenvalue " +
                                      std::to_string(out.min_eigenvalue) + ")",
                                  out.min_eigenvalue);
    out.chi = es.operatorSqrt();
    return out;
}

Chi chi(const NahmData& data, const FourPoint& t, double tol) {
    return chi_from_boundary(data, boundary_greens(data, t, tol));
}

Matrix sylvester_sqrt_derivative(const Matrix& chi, const Matrix& rhs) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (chi + chi.adjoint()));
    const Matrix& U = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();
    Matrix X = U.adjoint() * rhs * U;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) /= lam(i) + lam(j);
    return U * X * U.adjoint();
}

BlockMatrix dF_boundary(const NahmData& data, const FourPoint& t, int nu,
                        const ConnectionOptions& options) {
    if (nu < 0 || nu > 3) throw ConfigError("derivative direction out of range");
    if (options.method == DerivativeMethod::integral) return integral_derivative(data, t, nu, options);
    const BlockMatrix coarse = central_difference(data, t, nu, options.h, options.tol);
    if (!options.richardson) return coarse;
    const BlockMatrix fine = central_difference(data, t, nu, 0.5 * options.h, options.tol);
    return combine(fine, coarse, 4.0 / 3.0, -1.0 / 3.0);
}

double GaugePotential::antihermiticity_defect() const {
    double worst = 0.0;
    for (const auto& a : A) worst = std::max(worst, (a + a.adjoint()).norm());
    return worst;
}

GaugePotential gauge_potential(const NahmData& data, const FourPoint& t,
                               const ConnectionOptions& options) {
    if (options.check_regularity) {
        const auto reg = regularity(data, t, options.tol);
        if (!reg.is_regular)
            throw IrregularPoint("D or D^dag has a kernel at this t",
                                 std::min(reg.gap_Ddag, reg.gap_D));
    }
    const int N = data.boundary_dimension();
    const BoundaryGreens bg = boundary_greens(data, t, options.tol);
    const Chi c = chi_from_boundary(data, bg);
    const Matrix chi_inv = c.chi.inverse();

    std::array<BlockMatrix, 4> dF;
    std::array<Matrix, 4> dchi;
    for (int nu = 0; nu < 4; ++nu) {
        dF[nu] = hermitian_blocks(dF_boundary(data, t, nu, options));
        if (options.chi_method == ChiDerivative::sylvester) {
            dchi[nu] = sylvester_sqrt_derivative(
                c.chi, -boundary_sandwich(data, Matrix2::Identity(), dF[nu]));
        } else {
            const Matrix plus = chi(data, t.shifted(nu, options.h), options.tol).chi;
            const Matrix minus = chi(data, t.shifted(nu, -options.h), options.tol).chi;
            dchi[nu] = (plus - minus) / (2.0 * options.h);
            dchi[nu] = 0.5 * (dchi[nu] + dchi[nu].adjoint());
        }
    }

    const auto& basis = SpinBasis::instance();
    GaugePotential gp;
    gp.t = t;
    gp.chi_min_eigenvalue = c.min_eigenvalue;
    for (int mu = 0; mu < 4; ++mu) {
        Matrix bracket_term = Matrix::Zero(N, N);
        for (int nu = 0; nu < 4; ++nu) {
            if (nu == mu) continue;
            bracket_term += boundary_sandwich(data, basis.bracket[nu][mu], dF[nu]);
        }
        gp.A[mu] = -0.25 * chi_inv * bracket_term * chi_inv +
                   0.5 * (chi_inv * dchi[mu] - dchi[mu] * chi_inv);
    }
    return gp;
}

double Curvature::trace_square() const {
    double s = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) s += (F[mu][nu] * F[mu][nu]).trace().real();
    return s;
}

double Curvature::topological_density() const {
    // eps contraction: 8 * (F01 F23 + F02 F31 + F03 F12)
    const cplx v = (F[0][1] * F[2][3] + F[0][2] * F[3][1] + F[0][3] * F[1][2]).trace();
    return 8.0 * v.real();
}

Curvature curvature(const NahmData& data, const FourPoint& t, double h,
                    const ConnectionOptions& options) {
    const GaugePotential center = gauge_potential(data, t, options);
    std::array<GaugePotential, 4> plus, minus;
    for (int mu = 0; mu < 4; ++mu) {
        plus[mu] = gauge_potential(data, t.shifted(mu, h), options);
        minus[mu] = gauge_potential(data, t.shifted(mu, -h), options);
    }
    Curvature c;
    c.t = t;
    c.h = h;
    const int N = data.boundary_dimension();
    for (int mu = 0; mu < 4; ++mu) {
        c.F[mu][mu] = Matrix::Zero(N, N);
        for (int nu = mu + 1; nu < 4; ++nu) {
            const Matrix d_mu_A_nu = (plus[mu].A[nu] - minus[mu].A[nu]) / (2.0 * h);
            const Matrix d_nu_A_mu = (plus[nu].A[mu] - minus[nu].A[mu]) / (2.0 * h);
            c.F[mu][nu] = d_mu_A_nu - d_nu_A_mu + commutator(center.A[mu], center.A[nu]);
            c.F[nu][mu] = -c.F[mu][nu];
        }
    }
    return c;
}

SelfDualResidual selfdual_residual(const Curvature& c) {
    const auto& F = c.F;
    double total = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) total += F[mu][nu].norm();
    if (total == 0.0) return {0.0, 1};
    SelfDualResidual best{std::numeric_limits<double>::infinity(), 1};
    for (int eps : {1, -1}) {
        const double r = (F[0][1] - eps * F[2][3]).norm() + (F[0][2] - eps * F[3][1]).norm() +
                         (F[0][3] - eps * F[1][2]).norm();
        if (r / total < best.residual) best = {r / total, eps};
    }
    return best;
}

SelfDualResidual selfdual_residual(const NahmData& data, const FourPoint& t, double h,
                                   const ConnectionOptions& options) {
    return selfdual_residual(curvature(data, t, h, options));
}

} // namespace caloron
