#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "support.hpp"
#include "caloron/spin_algebra.hpp"

using namespace caloron;
using caloron::testing::max_abs;
using caloron::testing::scalar;

namespace {

double spectrum_distance(const Vector& a, const Vector& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < b.size(); ++j) best = std::min(best, std::abs(a(i) - b(j)));
        worst = std::max(worst, best);
    }
    return worst;
}

// k = 1 data with a jump in T_0 as well as in T_3
NahmData jumping_data() {
    const double p = std::numbers::pi;
    std::vector<std::array<Matrix, 4>> v(2);
    v[0] = {scalar(0.3), scalar(0.0), scalar(0.0), scalar(0.5)};
    v[1] = {scalar(-0.2), scalar(0.0), scalar(0.0), scalar(-0.5)};
    std::vector<JumpData> q(2);
    q[0].Q = Eigen::Vector2cd(0.0, std::sqrt(2.0));
    q[1].Q = Eigen::Vector2cd(std::sqrt(2.0), 0.0);
    return constant_nahm_data(1, {0.5 * p, 1.5 * p}, v, q);
}

// Second-order monodromy over [0, 2pi] with every delta replaced by a Gaussian
// of width w and every step by the matching erf profile.
Matrix mollified_monodromy(const NahmData& d, const FourPoint& t, OperatorTag tag, double w) {
    const int n = d.num_points();
    auto smooth = [&](int mu, double s, double* slope) {
        // start from the interval containing 0 and add smoothed jumps
        const auto [a0, r0] = d.locate(0.0, Side::right);
        double value = d.T_on(a0, mu, r0)(0, 0).real();
        double dv = 0.0;
        for (int alpha = 0; alpha < n; ++alpha) {
            const double lam = d.lambdas()[static_cast<std::size_t>(alpha)];
            const double jump = (d.T(mu, lam, Side::right) - d.T(mu, lam, Side::left))(0, 0).real();
            const double x = s - lam;
            value += jump * 0.5 * (1.0 + std::erf(x / (w * std::sqrt(2.0))));
            dv += jump * std::exp(-x * x / (2 * w * w)) / (w * std::sqrt(2.0 * std::numbers::pi));
        }
        if (slope) *slope = dv;
        return value;
    };
    auto bump = [&](int alpha, double s) {
        const double x = s - d.lambdas()[static_cast<std::size_t>(alpha)];
        return std::exp(-x * x / (2 * w * w)) / (w * std::sqrt(2.0 * std::numbers::pi));
    };
    const bool lifted = tag == OperatorTag::DdagD;
    const int m = lifted ? 2 : 1;
    auto coeff = [&](double s) -> Matrix {
        double dA = 0.0;
        const double A = smooth(0, s, &dA) + t[0];
        double V = 0.0;
        std::array<double, 4> dT{};
        for (int j = 1; j <= 3; ++j) {
            const double Tj = smooth(j, s, &dT[static_cast<std::size_t>(j)]) + t[j];
            V += Tj * Tj;
        }
        Matrix lower = (I_unit * dA + A * A + V) * Matrix::Identity(m, m);
        if (lifted) {
            for (int j = 1; j <= 3; ++j)
                lower += kron_spin(quaternion_unit(j), scalar(I_unit * dT[static_cast<std::size_t>(j)]));
        } else {
            for (int alpha = 0; alpha < n; ++alpha) {
                const Matrix& Q = d.jump(alpha).Q;
                lower += bump(alpha, s) * 0.5 * spin_trace(Q * Q.adjoint());
            }
        }
        Matrix M = Matrix::Zero(2 * m, 2 * m);
        M.topRightCorner(m, m).setIdentity();
        M.bottomLeftCorner(m, m) = lower;
        M.bottomRightCorner(m, m) = 2.0 * I_unit * A * Matrix::Identity(m, m);
        return M;
    };
    return transfer(coeff, 0.0, two_pi, 1e-11);
}

} // namespace

TEST_CASE("transfer: zero coefficient") {
    const Matrix id = Matrix::Identity(3, 3);
    CHECK(max_abs(transfer([](double) { return Matrix::Zero(3, 3).eval(); }, 0.0, 2.0) - id) == 0.0);
    CHECK(max_abs(transfer([](double) { return Matrix::Zero(3, 3).eval(); }, 1.0, 1.0) - id) == 0.0);
    CHECK_THROWS_AS(transfer([](double) { return Matrix::Zero(1, 1).eval(); }, 1.0, 0.0), ConfigError);
}

TEST_CASE("transfer: constant coefficient matches the matrix exponential") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix C = 0.5 * caloron::testing::random_matrix(rng, 4, 4);
        const Matrix phi = transfer([&](double) { return C; }, 0.3, 1.8, 1e-12);
        const Matrix expC = (C * 1.5).exp();
        CHECK(max_abs(phi - expC) < 1e-10 * std::max(1.0, max_abs(expC)));
    }
}

TEST_CASE("transfer: scalar i s") {
    const double s0 = 0.2, s1 = 3.1;
    const Matrix phi = transfer([](double s) { return scalar(I_unit * s); }, s0, s1, 1e-12);
    CHECK(std::abs(phi(0, 0) - std::exp(I_unit * 0.5 * (s1 * s1 - s0 * s0))) < 1e-10);
}

TEST_CASE("transfer: flow composition") {
    std::mt19937_64 rng(4);
    const Matrix A = caloron::testing::random_matrix(rng, 3, 3);
    const Matrix B = caloron::testing::random_matrix(rng, 3, 3);
    auto coeff = [&](double s) -> Matrix { return 0.3 * (std::cos(s) * A + std::sin(2 * s) * B); };
    const double tol = 1e-10;
    const Matrix p01 = transfer(coeff, 0.0, 1.1, tol);
    const Matrix p12 = transfer(coeff, 1.1, 2.5, tol);
    const Matrix p02 = transfer(coeff, 0.0, 2.5, tol);
    CHECK(max_abs(p12 * p01 - p02) < 10 * tol * std::max(1.0, max_abs(p02)));
}

TEST_CASE("transfer: step underflow is reported with its location") {
    auto singular = [](double s) { return scalar(1.0 / ((s - 1.0) * (s - 1.0))); };
    try {
        transfer(singular, 0.0, 2.0);
        FAIL("expected an integrator error");
    } catch (const IntegratorError& e) {
        CHECK(std::abs(e.location() - 1.0) < 1e-2);
    }
}

TEST_CASE("first-order monodromy examples") {
    const NahmData free = free_data();
    FourPoint t;
    t[0] = 0.37;
    const Monodromy m = circle_monodromy_first_order(free, t, 0.0, WeylOperator::Ddag);
    CHECK(max_abs(m.matrix - std::exp(two_pi * I_unit * 0.37) * Matrix::Identity(2, 2)) < 1e-9);

    std::mt19937_64 rng(8);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomDataOptions opt;
        opt.jump_scale = 0.5;
        const NahmData d = random_nahm_data(seed, opt);
        const FourPoint tt = caloron::testing::regular_point(d, rng);
        for (auto which : {WeylOperator::Ddag, WeylOperator::D}) {
            FourPoint t0 = tt;
            t0[0] = 0.0;
            const Matrix a = circle_monodromy_first_order(d, tt, 0.4, which, 1e-13).matrix;
            const Matrix b = circle_monodromy_first_order(d, t0, 0.4, which, 1e-13).matrix;
            CHECK(max_abs(a - std::exp(two_pi * I_unit * tt[0]) * b) < 1e-9);
            // conjugate monodromies at different base points
            const Monodromy m0 = circle_monodromy_first_order(d, tt, 0.0, which);
            const Monodromy m1 = circle_monodromy_first_order(d, tt, 1.3, which);
            CHECK(spectrum_distance(m0.eigenvalues(), m1.eigenvalues()) < 1e-8);
        }
    }
}

TEST_CASE("monodromy composed with itself covers 4 pi") {
    const NahmData d = random_nahm_data(2);
    FourPoint t;
    t.t = {0.1, 0.2, -0.1, 0.05};
    const CircleFlow flow(d, t, OperatorTag::Ddag);
    const Matrix one = flow.propagate(0.3, Side::right, 0.3 + two_pi, Side::right, 1e-12);
    const Matrix two = flow.propagate(0.3, Side::right, 0.3 + 2 * two_pi, Side::right, 1e-12);
    CHECK(max_abs(one * one - two) < 1e-8 * std::max(1.0, max_abs(two)));

    const CircleFlow second(d, t, OperatorTag::DdagD);
    const double lam = d.lambda(1);
    const Matrix s1 = second.propagate(lam, Side::right, lam + two_pi, Side::right, 1e-12);
    const Matrix s2 = second.propagate(lam, Side::right, lam + 2 * two_pi, Side::right, 1e-12);
    CHECK(max_abs(s1 * s1 - s2) < 1e-8 * std::max(1.0, max_abs(s2)));
}

TEST_CASE("halving tol changes monodromies by less than tol") {
    const NahmData d = reference_dataset();
    FourPoint t;
    t.t = {0.2, 0.1, 0.1, 0.1};
    for (auto tag : {OperatorTag::Finv, OperatorTag::DdagD}) {
        const Matrix a = circle_monodromy_second_order(d, t, 0.0, tag, 1e-10).matrix;
        const Matrix b = circle_monodromy_second_order(d, t, 0.0, tag, 5e-11).matrix;
        CHECK(max_abs(a - b) < 1e-10 * std::max(1.0, max_abs(a)));
    }
}

TEST_CASE("second_order_jump examples") {
    const NahmData free = free_data();
    FourPoint t;
    for (auto tag : {OperatorTag::Finv, OperatorTag::DdagD}) {
        const Matrix J = second_order_jump(free, t, 0, tag);
        CHECK(max_abs(J - Matrix::Identity(J.rows(), J.cols())) == 0.0);
    }
    std::array<Matrix, 4> v{scalar(0.0), scalar(0.0), scalar(0.0), scalar(0.0)};
    const NahmData up = constant_nahm_data(1, {0.0}, {v}, {JumpData{Eigen::Vector2cd(1.0, 0.0)}});
    const Matrix J = second_order_jump(up, t, 0, OperatorTag::Finv);
    CHECK(std::abs(J(1, 0) - 0.5) < 1e-15);
    CHECK(std::abs(J(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(J(0, 1)) == 0.0);
    CHECK_THROWS_AS(second_order_jump(up, t, 3, OperatorTag::Finv), ConfigError);
}

TEST_CASE("mollified deltas converge to the jump maps") {
    FourPoint t;
    t.t = {0.2, 0.1, 0.1, 0.1};
    for (const NahmData& d : {reference_dataset(), jumping_data()}) {
        for (auto tag : {OperatorTag::Finv, OperatorTag::DdagD}) {
            const Matrix exact = circle_monodromy_second_order(d, t, 0.0, tag, 1e-11).matrix;
            const double scale = max_abs(exact);
            const double e1 = max_abs(mollified_monodromy(d, t, tag, 0.02) - exact) / scale;
            const double e2 = max_abs(mollified_monodromy(d, t, tag, 0.01) - exact) / scale;
            INFO("tag " << std::string(to_string(tag)) << " errors " << e1 << " " << e2);
            CHECK(e2 < e1);
            CHECK(e2 < 0.6 * e1);
            CHECK(e2 < 2e-2);
        }
    }
}

TEST_CASE("second-order monodromy: free field") {
    const NahmData free = free_data();
    FourPoint t;
    t.t = {0.3, 0.4, 0.0, 0.0};
    const Monodromy m = circle_monodromy_second_order(free, t, 0.0, OperatorTag::Finv);
    Vector expect(2);
    expect << std::exp(two_pi * I_unit * cplx(0.3, -0.4)), std::exp(two_pi * I_unit * cplx(0.3, 0.4));
    CHECK(spectrum_distance(m.eigenvalues(), expect) < 1e-8 * std::abs(expect(1)));
    CHECK(spectrum_distance(expect, m.eigenvalues()) < 1e-8 * std::abs(expect(1)));

    const Monodromy z = circle_monodromy_second_order(free, FourPoint{}, 0.0, OperatorTag::Finv);
    const Vector ev = z.eigenvalues();
    CHECK(std::abs(ev(0) - 1.0) < 1e-8);
    CHECK(std::abs(ev(1) - 1.0) < 1e-8);

    const Matrix f = m.matrix;
    const Matrix g = circle_monodromy_second_order(free, t, 0.0, OperatorTag::DdagD).matrix;
    // stacked (f, f') on two spin components: same block on each component
    for (int sc = 0; sc < 2; ++sc)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) CHECK(std::abs(g(r * 2 + sc, c * 2 + sc) - f(r, c)) < 1e-9 * max_abs(f));
    CHECK(std::abs(g(0, 1)) < 1e-12);
}

TEST_CASE("regularity examples") {
    const NahmData free = free_data();
    const Regularity r0 = regularity(free, FourPoint{});
    CHECK(r0.gap_Ddag < 1e-9);
    CHECK_FALSE(r0.is_regular);
    FourPoint half;
    half[0] = 0.5;
    const Regularity r1 = regularity(free, half);
    CHECK(std::abs(r1.gap_Ddag - 2.0) < 1e-8);
    CHECK(std::abs(r1.gap_D - 2.0) < 1e-8);
    CHECK(r1.is_regular);

    const NahmData ref = reference_dataset();
    FourPoint t;
    t.t = {0.2, 0.3, -0.1, 0.25};
    const Regularity a = regularity(ref, t);
    const Regularity b = regularity(ref, t.shifted(0, 1.0));
    CHECK(std::abs(a.gap_Ddag - b.gap_Ddag) < 1e-8);
    CHECK(std::abs(a.gap_D - b.gap_D) < 1e-8);
}
