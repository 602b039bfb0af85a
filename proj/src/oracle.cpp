#include "caloron/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "caloron/quadrature.hpp"
#include "caloron/spin_algebra.hpp"

namespace caloron {

namespace {

Matrix hermitian_exp_i(const Matrix& H, double scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.adjoint()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    Vector phases(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) phases(i) = std::exp(I_unit * (scale * ev(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double wrap_offset(double x, double y) {
    double d = std::fmod(x - y, two_pi);
    if (d < 0.0) d += two_pi;
    return d;
}

Matrix random_unitary(std::mt19937_64& rng, int k) {
    std::normal_distribution<double> g;
    Matrix z(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) z(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    return qr.householderQ() * Matrix::Identity(k, k);
}

Eigen::Vector3d random_vector(std::mt19937_64& rng, double lo, double hi) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::Vector3d v(g(rng), g(rng), g(rng));
    return u(rng) * v.normalized();
}

Matrix spin_lift(const Matrix& g) { return kron_spin(Matrix2::Identity(), g); }

} // namespace

// --- free field ------------------------------------------------------------

double free_field_F(double r, double x, double y) {
    if (!(r > 0.0)) throw ConfigError("free_field_F requires r > 0");
    double d = wrap_offset(x, y);
    if (d > std::numbers::pi) d = two_pi - d;
    // cosh(r(pi - d)) / (2 r sinh(pi r)) without overflow
    const double num = std::exp(-r * d) + std::exp(-r * (two_pi - d));
    return num / (2.0 * r * (1.0 - std::exp(-two_pi * r)));
}

double free_field_fourier_sum(double r, double x, double y, int modes) {
    if (!(r > 0.0)) throw ConfigError("free_field_fourier_sum requires r > 0");
    const double d = x - y;
    double s = 0.0;
    for (int m = modes; m >= 1; --m) s += 2.0 * std::cos(m * d) / (double(m) * m + r * r);
    s += 1.0 / (r * r);
    return s / two_pi;
}

// --- dense discretization ----------------------------------------------------

double DenseOperator::hermiticity_defect() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

DenseOperator dense_operator(const NahmData& data, const FourPoint& t, int N) {
    if (N < 64) throw ConfigError("dense oracle needs N >= 64");
    const int k = data.rank();
    const int n = data.num_points();
    DenseOperator op;
    op.N = N;
    op.h = two_pi / N;
    op.section_dim = k;
    const double h = op.h;

    std::vector<int> node_point(static_cast<std::size_t>(N), -1);
    for (int alpha = 0; alpha < n; ++alpha) {
        const double lam = data.lambdas()[static_cast<std::size_t>(alpha)];
        const long node = std::lround(lam / h);
        if (std::abs(lam - node * h) > 1e-12)
            throw ConfigError("marked point " + std::to_string(alpha) + " is not on the N=" +
                              std::to_string(N) + " grid");
        op.marked_nodes.push_back(static_cast<int>(node % N));
        node_point[static_cast<std::size_t>(node % N)] = alpha;
    }

    const Matrix id = Matrix::Identity(k, k);
    auto potential = [&](double s, Side side) {
        const auto [a, r] = data.locate(s, side);
        Matrix V = Matrix::Zero(k, k);
        for (int j = 1; j <= 3; ++j) {
            const Matrix Tj = data.T_on(a, j, r) + t[j] * id;
            V += Tj * Tj;
        }
        return V;
    };

    op.matrix = Matrix::Zero(k * N, k * N);
    const double h2 = h * h;
    for (int node = 0; node < N; ++node) {
        const double s = node * h;
        const int alpha = node_point[static_cast<std::size_t>(node)];
        Matrix diag = 2.0 / h2 * id;
        if (alpha < 0) {
            diag += potential(s, Side::right);
        } else {
            diag += 0.5 * (potential(s, Side::left) + potential(s, Side::right));
            const Matrix& Q = data.jump(alpha).Q;
            diag += 0.5 * spin_trace(Q * Q.adjoint()) / h;
        }
        op.matrix.block(node * k, node * k, k, k) += diag;

        const double mid = s + 0.5 * h;
        const auto [a, r] = data.locate(mid, Side::right);
        const Matrix A = data.T_on(a, 0, r) + t[0] * id;
        const Matrix W = hermitian_exp_i(A, -h);
        const int next = (node + 1) % N;
        op.matrix.block(node * k, next * k, k, k) -= W / h2;
        op.matrix.block(next * k, node * k, k, k) -= W.adjoint() / h2;
    }
    return op;
}

BoundaryGreens dense_greens(const NahmData& data, const FourPoint& t, int N) {
    const DenseOperator op = dense_operator(data, t, N);
    const int k = op.section_dim;
    const int n = data.num_points();
    Matrix rhs = Matrix::Zero(k * N, k * n);
    for (int alpha = 0; alpha < n; ++alpha)
        rhs.block(op.marked_nodes[static_cast<std::size_t>(alpha)] * k, alpha * k, k, k).setIdentity();

    Eigen::PartialPivLU<Matrix> lu(op.matrix);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / max_resolvent_condition))
        throw IrregularPoint("dense operator is singular", 0.0);
    const Matrix X = lu.solve(rhs) / op.h;

    BoundaryGreens bg;
    bg.t = t;
    bg.condition = 1.0 / rc;
    bg.F.assign(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            bg.F[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                X.block(op.marked_nodes[static_cast<std::size_t>(b)] * k, a * k, k, k);
    return bg;
}

// --- classical path through the zero modes ------------------------------------

ZeroModes::ZeroModes(const NahmData& data, const FourPoint& t, double tol)
    : data_(data), t_(t), tol_(tol) {
    const auto reg = regularity(data, t, tol);
    if (!reg.is_regular) throw IrregularPoint("zero modes requested at an irregular point", reg.gap_Ddag);
    chi_ = caloron::chi(data, t, tol).chi;

    const CircleFlow flow(data, t, OperatorTag::Ddag);
    const int m = flow.section_dimension();
    const Matrix id = Matrix::Identity(m, m);
    for (int alpha = 0; alpha < data.num_points(); ++alpha) {
        const double lam = data.lambda(alpha);
        const Matrix iota = flow.propagate(lam, Side::right, lam + two_pi, Side::right, tol);
        const Matrix chi_alpha = chi_.middleRows(data.boundary_offset(alpha), data.jump(alpha).width());
        const Matrix resolvent = (iota - id).partialPivLu().solve(data.jump(alpha).Q * chi_alpha);
        source_.push_back(I_unit * resolvent);
    }
}

Matrix ZeroModes::psi(double s) const {
    const CircleFlow flow(data_, t_, OperatorTag::Ddag);
    Matrix out = Matrix::Zero(2 * data_.rank(), chi_.cols());
    for (int alpha = 0; alpha < data_.num_points(); ++alpha) {
        const double lam = data_.lambda(alpha);
        const double d = wrap_offset(s, lam);
        out -= flow.propagate(lam, Side::right, lam + d, Side::left, source_[static_cast<std::size_t>(alpha)], tol_);
    }
    return out;
}

Matrix ZeroModes::gram(double quad_tol) const {
    Matrix total = chi_.adjoint() * chi_;
    for (int a = 0; a < data_.num_points(); ++a) {
        auto f = [&](double s) -> Matrix {
            const Matrix p = psi(s);
            return p.adjoint() * p;
        };
        total += integrate(f, data_.interval_start(a), data_.interval_end(a), quad_tol).value;
    }
    return total;
}

double ZeroModes::gram_defect(double quad_tol) const {
    const Matrix g = gram(quad_tol);
    return (g - Matrix::Identity(g.rows(), g.cols())).norm();
}

GaugePotential classical_gauge_potential(const NahmData& data, const FourPoint& t, double h,
                                         double quad_tol, double tol) {
    const ZeroModes center(data, t, tol);
    GaugePotential gp;
    gp.t = t;
    gp.chi_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(center.chi()).eigenvalues().minCoeff();
    for (int mu = 0; mu < 4; ++mu) {
        const ZeroModes plus(data, t.shifted(mu, h), tol);
        const ZeroModes minus(data, t.shifted(mu, -h), tol);
        Matrix A = center.chi().adjoint() * (plus.chi() - minus.chi()) / (2.0 * h);
        for (int a = 0; a < data.num_points(); ++a) {
            auto f = [&](double s) -> Matrix {
                return center.psi(s).adjoint() * (plus.psi(s) - minus.psi(s)) / (2.0 * h);
            };
            A += integrate(f, data.interval_start(a), data.interval_end(a), quad_tol).value;
        }
        gp.A[mu] = A;
    }
    return gp;
}

// --- reference data ---------------------------------------------------------

Eigen::Vector2cd spinor_for_jump(const Eigen::Vector3d& v) {
    const double norm = v.norm();
    if (norm == 0.0) return Eigen::Vector2cd::Zero();
    const Eigen::Vector3d m = -v / norm;
    const double z = std::clamp(m.z(), -1.0, 1.0);
    const double rho = std::hypot(m.x(), m.y());
    const cplx phase = rho > 0.0 ? cplx(m.x(), m.y()) / rho : cplx(1.0);
    const double amp = std::sqrt(2.0 * norm);
    return {amp * std::sqrt(0.5 * (1.0 + z)), amp * phase * std::sqrt(0.5 * (1.0 - z))};
}

NahmData su2_reference_data(double m1, double m2, const Eigen::Vector3d& n1,
                            const Eigen::Vector3d& n2, double lambda1, double lambda2) {
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw ConfigError("jump magnitudes must be positive");
    if (!(0.0 <= lambda1 && lambda1 < lambda2 && lambda2 < two_pi))
        throw ConfigError("need 0 <= lambda1 < lambda2 < 2pi");
    if (std::abs(n1.norm() - 1.0) > 1e-12 || std::abs(n2.norm() - 1.0) > 1e-12)
        throw ConfigError("jump directions must be unit vectors");
    const Eigen::Vector3d v1 = m1 * n1;
    const Eigen::Vector3d v2 = m2 * n2;
    if ((v1 + v2).norm() > 1e-12) throw ConfigError("jumps do not close around the circle");

    // value on interval 0 chosen so that T has zero mean
    const double len1 = two_pi - (lambda2 - lambda1);
    const Eigen::Vector3d c = -v2 * len1 / two_pi;
    std::vector<std::array<Matrix, 4>> values(2);
    for (int j = 1; j <= 3; ++j) {
        values[0][static_cast<std::size_t>(j)] = Matrix::Constant(1, 1, c(j - 1));
        values[1][static_cast<std::size_t>(j)] = Matrix::Constant(1, 1, c(j - 1) + v2(j - 1));
    }
    values[0][0] = Matrix::Zero(1, 1);
    values[1][0] = Matrix::Zero(1, 1);
    std::vector<JumpData> jumps(2);
    jumps[0].Q = spinor_for_jump(v1);
    jumps[1].Q = spinor_for_jump(v2);
    return constant_nahm_data(1, {lambda1, lambda2}, values, std::move(jumps),
                              "SU(2) caloron, k = 1, n = 2");
}

NahmData reference_dataset() {
    return su2_reference_data(1.0, 1.0, Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ(),
                              0.5 * std::numbers::pi, 1.5 * std::numbers::pi);
}

NahmData free_data(double lambda) {
    std::vector<std::array<Matrix, 4>> values(1);
    for (auto& v : values[0]) v = Matrix::Zero(1, 1);
    std::vector<JumpData> jumps(1);
    jumps[0].Q = Matrix::Zero(2, 1);
    return constant_nahm_data(1, {lambda}, values, std::move(jumps), "free field, k = 1");
}

NahmData gauge_transform(const NahmData& data, const Matrix& H, const std::vector<double>& phi_at_lambda,
                         int degree) {
    const int n = data.num_points();
    if (static_cast<int>(phi_at_lambda.size()) != n) throw ConfigError("one phase per marked point required");
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i) - std::round(es.eigenvalues()(i))) > 1e-12)
            throw ConfigError("gauge generator must have integer eigenvalues");

    auto phase = [&](int a) { return a == n ? phi_at_lambda[0] + two_pi : phi_at_lambda[static_cast<std::size_t>(a)]; };
    std::vector<IntervalModel> intervals;
    for (int a = 0; a < n; ++a) {
        const double lo = data.interval_start(a);
        const double slope = (phase(a + 1) - phase(a)) / data.interval_length(a);
        auto f = [&](int mu, double s) -> Matrix {
            const Matrix g = hermitian_exp_i(H, phase(a) + slope * (s - lo));
            Matrix v = g * data.T_on(a, mu, s) * g.adjoint();
            if (mu == 0) v += slope * H;
            return v;
        };
        intervals.push_back(fit_interval(f, lo, data.interval_end(a), degree));
    }
    std::vector<JumpData> jumps;
    for (int alpha = 0; alpha < n; ++alpha)
        jumps.push_back({spin_lift(hermitian_exp_i(H, phase(alpha))) * data.jump(alpha).Q});
    return NahmData(data.rank(), data.lambdas(), std::move(intervals), std::move(jumps),
                    data.description() + " (gauge transformed)");
}

NahmData random_nahm_data(std::uint64_t seed, const RandomDataOptions& opt) {
    if (opt.k < 1 || opt.n < 1) throw ConfigError("random data needs k, n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int k = opt.k;
    const int n = opt.n;

    std::vector<double> lambdas;
    const double min_gap = 0.6 * two_pi / (2.0 * n);
    for (;;) {
        lambdas.clear();
        for (int i = 0; i < n; ++i) lambdas.push_back(two_pi * unit(rng));
        std::sort(lambdas.begin(), lambdas.end());
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            const double next = i + 1 < n ? lambdas[static_cast<std::size_t>(i + 1)] : lambdas[0] + two_pi;
            ok = ok && next - lambdas[static_cast<std::size_t>(i)] > min_gap;
        }
        if (ok) break;
    }

    // per component a: jumps at chosen marked points, summing to zero
    std::vector<std::vector<Eigen::Vector2cd>> columns(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> column_component(static_cast<std::size_t>(n));
    std::vector<std::vector<Eigen::Vector3d>> jump_at(static_cast<std::size_t>(k),
                                                      std::vector<Eigen::Vector3d>(static_cast<std::size_t>(n), Eigen::Vector3d::Zero()));
    std::vector<std::vector<int>> support(static_cast<std::size_t>(k));
    std::vector<bool> covered(static_cast<std::size_t>(n), false);
    for (auto& points : support) {
        if (n == 1) {
            points = {0, 0};
        } else {
            std::vector<int> all(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
            std::shuffle(all.begin(), all.end(), rng);
            const int count = 2 + static_cast<int>(unit(rng) * (n - 1));
            points.assign(all.begin(), all.begin() + std::min(count, n));
        }
        for (int p : points) covered[static_cast<std::size_t>(p)] = true;
    }
    for (int i = 0; i < n; ++i)
        if (!covered[static_cast<std::size_t>(i)]) support[0].push_back(i);
    for (int a = 0; a < k; ++a) {
        const auto& points = support[static_cast<std::size_t>(a)];
        std::vector<Eigen::Vector3d> jumps;
        for (;;) {
            jumps.clear();
            Eigen::Vector3d sum = Eigen::Vector3d::Zero();
            for (std::size_t i = 0; i + 1 < points.size(); ++i) {
                jumps.push_back(random_vector(rng, 0.3 * opt.jump_scale, opt.jump_scale));
                sum += jumps.back();
            }
            jumps.push_back(-sum);
            if (sum.norm() > 0.2 * opt.jump_scale) break;
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto p = static_cast<std::size_t>(points[i]);
            columns[p].push_back(spinor_for_jump(jumps[i]));
            column_component[p].push_back(a);
            jump_at[static_cast<std::size_t>(a)][p] += jumps[i];
        }
    }

    std::vector<std::array<Matrix, 4>> values(static_cast<std::size_t>(n));
    for (auto& v : values)
        for (auto& m : v) m = Matrix::Zero(k, k);
    for (int a = 0; a < k; ++a) {
        Eigen::Vector3d value = random_vector(rng, 0.0, 0.5);
        const double t0 = unit(rng) - 0.5;
        for (int i = 0; i < n; ++i) {
            if (i > 0) value += jump_at[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
            values[static_cast<std::size_t>(i)][0](a, a) = t0;
            for (int j = 1; j <= 3; ++j) values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](a, a) = value(j - 1);
        }
    }

    const Matrix U = random_unitary(rng, k);
    for (auto& v : values)
        for (auto& m : v) m = U * m * U.adjoint();
    std::vector<JumpData> jumps(static_cast<std::size_t>(n));
    for (int alpha = 0; alpha < n; ++alpha) {
        const auto& cols = columns[static_cast<std::size_t>(alpha)];
        Matrix Q = Matrix::Zero(2 * k, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const int a = column_component[static_cast<std::size_t>(alpha)][c];
            Q(a, static_cast<Eigen::Index>(c)) = cols[c](0);
            Q(k + a, static_cast<Eigen::Index>(c)) = cols[c](1);
        }
        jumps[static_cast<std::size_t>(alpha)].Q = spin_lift(U) * Q;
    }
    NahmData data = constant_nahm_data(k, lambdas, values, std::move(jumps),
                                       "random Nahm data, seed " + std::to_string(seed));
    if (!opt.gauge_twist) return data;

    Eigen::VectorXd charges(k);
    std::uniform_int_distribution<int> charge(-1, 1);
    for (int a = 0; a < k; ++a) charges(a) = charge(rng);
    if (charges.cwiseAbs().sum() == 0.0) charges(0) = 1.0;
    const Matrix V = random_unitary(rng, k);
    const Matrix H = V * charges.cast<cplx>().asDiagonal() * V.adjoint();
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int alpha = 0; alpha < n; ++alpha)
        phi[static_cast<std::size_t>(alpha)] = (lambdas[static_cast<std::size_t>(alpha)] - lambdas[0]) + 0.5 * (unit(rng) - 0.5) * (alpha > 0);
    return gauge_transform(data, H, phi, opt.degree);
}

} // namespace caloron
