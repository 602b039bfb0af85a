#include <cmath>
#include <numbers>

#include "support.hpp"
#include "caloron/spin_algebra.hpp"

using namespace caloron;
using caloron::testing::max_abs;
using caloron::testing::scalar;

namespace {

FourPoint reference_point() {
    FourPoint t;
    t.t = {0.2, 0.1, 0.1, 0.1};
    return t;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return num / den;
}

} // namespace

TEST_CASE("free field closed form") {
    for (double r : {0.5, 1.0, 2.0}) {
        CHECK(free_field_F(r, 1.0, 1.0) == doctest::Approx(1.0 / (2 * r * std::tanh(std::numbers::pi * r))).epsilon(1e-14));
        for (double d : {0.7, 2.5, 4.0})
            CHECK(std::abs(free_field_fourier_sum(r, 1.0 + d, 1.0, 10000) - free_field_F(r, 1.0 + d, 1.0)) < 1e-8);
        CHECK(free_field_F(r, 0.3, 1.4) == doctest::Approx(free_field_F(r, 1.4, 0.3)).epsilon(1e-15));
        CHECK(free_field_F(r, 0.3, 1.4) == doctest::Approx(free_field_F(r, 0.3 + two_pi, 1.4)).epsilon(1e-13));
    }
    CHECK(std::abs(free_field_F(40.0, 0.0, 0.0) - 1.0 / 80.0) < 1e-15);
    CHECK(std::isfinite(free_field_F(800.0, 0.0, 0.0)));
    CHECK_THROWS_AS(free_field_F(0.0, 0.0, 0.0), ConfigError);
}

TEST_CASE("dense operator") {
    const NahmData d = reference_dataset();
    const DenseOperator op = dense_operator(d, reference_point(), 128);
    CHECK(op.hermiticity_defect() < 1e-12);
    CHECK(op.marked_nodes == std::vector<int>{32, 96});
    CHECK_THROWS_AS(dense_operator(d, reference_point(), 32), ConfigError);
    CHECK_THROWS_AS(dense_operator(d, reference_point(), 130), ConfigError);  // pi/2 off the grid
    CHECK_THROWS_AS(dense_greens(free_data(), FourPoint{}, 64), IrregularPoint);
}

TEST_CASE("dense oracle: free field") {
    FourPoint t;
    t[1] = 1.0;
    const double exact = free_field_F(1.0, 0.0, 0.0);
    const double e1 = std::abs(dense_greens(free_data(), t, 128).F[0][0](0, 0) - exact);
    const double e2 = std::abs(dense_greens(free_data(), t, 256).F[0][0](0, 0) - exact);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("dense oracle: convergence to the boundary Green's matrix") {
    const NahmData d = reference_dataset();
    const FourPoint t = reference_point();
    const Matrix F = boundary_greens(d, t).F_matrix();
    std::vector<double> N, err;
    for (int n : {64, 128, 256, 512}) {
        N.push_back(n);
        err.push_back((dense_greens(d, t, n).F_matrix() - F).norm());
    }
    CHECK(-slope(N, err) >= 1.8);
    CHECK(err[0] / err[3] == doctest::Approx(64.0).epsilon(0.1));

    // k = 1 with a single jump, matching condition ignored: both sides solve the same operator
    std::vector<std::array<Matrix, 4>> v{{scalar(0.15), scalar(0.1), scalar(-0.2), scalar(0.3)}};
    const NahmData one = constant_nahm_data(1, {0.0}, v, {JumpData{Eigen::Vector2cd(1.0, 0.0)}});
    const Matrix F1 = boundary_greens(one, t).F_matrix();
    const double a = (dense_greens(one, t, 128).F_matrix() - F1).norm();
    const double b = (dense_greens(one, t, 256).F_matrix() - F1).norm();
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("dense oracle: s-dependent data") {
    // twisted data with lambda on grid nodes
    NahmData plain = su2_reference_data(0.8, 0.8, Eigen::Vector3d(0.6, 0.0, 0.8), Eigen::Vector3d(-0.6, 0.0, -0.8),
                                        0.5 * std::numbers::pi, std::numbers::pi);
    const NahmData twisted = gauge_transform(plain, scalar(1.0), {0.0, 1.0});
    const FourPoint t = reference_point();
    const Matrix F = boundary_greens(twisted, t).F_matrix();
    const double a = (dense_greens(twisted, t, 128).F_matrix() - F).norm();
    const double b = (dense_greens(twisted, t, 256).F_matrix() - F).norm();
    CHECK(a / b > 3.5);
    CHECK(b < 1e-4);
}

TEST_CASE("zero modes") {
    FourPoint t;
    t.t = {0.3, 0.2, 0.1, 0.0};
    const ZeroModes free(free_data(), t);
    CHECK(max_abs(free.psi(1.0)) < 1e-14);
    CHECK(free.gram_defect() < 1e-14);

    const NahmData d = reference_dataset();
    const ZeroModes zm(d, reference_point());
    CHECK(zm.gram_defect(1e-8) < 1e-6);
    CHECK(zm.gram_defect(1e-10) <= zm.gram_defect(1e-3) + 1e-12);
    // the zero modes are annihilated by D^dag away from the marked points
    const double s = 2.3, h = 1e-3;
    const Matrix dpsi = (zm.psi(s - 2 * h) - 8.0 * zm.psi(s - h) + 8.0 * zm.psi(s + h) - zm.psi(s + 2 * h)) / (12 * h);
    const Matrix M = weyl_coefficient(d, reference_point(), s, Side::right, WeylOperator::Ddag);
    CHECK(max_abs(dpsi - M * zm.psi(s)) < 1e-8);
    CHECK_THROWS_AS(ZeroModes(free_data(), FourPoint{}), IrregularPoint);
}

TEST_CASE("classical and compact gauge potentials coincide") {
    const NahmData d = reference_dataset();
    for (const FourPoint& t : {reference_point(), FourPoint{{-0.35, 0.4, -0.2, 0.3}}}) {
        const GaugePotential a = classical_gauge_potential(d, t);
        const GaugePotential b = gauge_potential(d, t);
        for (int mu = 0; mu < 4; ++mu) {
            CHECK(max_abs(a.A[mu] - b.A[mu]) < 1e-4);
            CHECK(max_abs(a.A[mu] + a.A[mu].adjoint()) < 1e-6);
        }
    }
    FourPoint t;
    t.t = {0.3, 0.2, 0.1, 0.0};
    const GaugePotential zero = classical_gauge_potential(free_data(), t);
    for (const auto& a : zero.A) CHECK(max_abs(a) < 1e-12);
}

TEST_CASE("classical and compact agree on non-abelian twisted data") {
    std::mt19937_64 rng(19);
    const NahmData d = random_nahm_data(23, {2, 2, true, 0.8, 24});
    const FourPoint t = caloron::testing::regular_point(d, rng);
    const GaugePotential a = classical_gauge_potential(d, t);
    const GaugePotential b = gauge_potential(d, t);
    for (int mu = 0; mu < 4; ++mu) CHECK(max_abs(a.A[mu] - b.A[mu]) < 1e-4);
}

TEST_CASE("reference data builder") {
    const NahmData d = reference_dataset();
    CHECK(d.rank() == 1);
    CHECK(d.num_points() == 2);
    for (int a = 0; a < 2; ++a)
        for (const auto& m : matching_residual(d, a)) CHECK(max_abs(m) < 1e-15);
    CHECK(std::abs(d.T(3, 2.0)(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(d.T(3, 5.0)(0, 0) + 0.5) < 1e-15);
    // jump along +z of magnitude 1 is realized by (0, sqrt 2) up to a phase
    const Matrix& Q0 = d.jump(0).Q;
    CHECK(std::abs(Q0(0, 0)) < 1e-15);
    CHECK(std::abs(std::abs(Q0(1, 0)) - std::sqrt(2.0)) < 1e-15);

    const NahmData tilted = su2_reference_data(0.7, 0.7, Eigen::Vector3d(0.0, 0.6, 0.8), Eigen::Vector3d(0.0, -0.6, -0.8), 1.0, 4.0);
    CHECK(validate(tilted).max_residual() < 1e-14);
    for (int j = 1; j <= 3; ++j) {
        // around the circle the jumps add to zero
        const double total = (tilted.T(j, 1.0, Side::right) - tilted.T(j, 1.0, Side::left))(0, 0).real() +
                             (tilted.T(j, 4.0, Side::right) - tilted.T(j, 4.0, Side::left))(0, 0).real();
        CHECK(std::abs(total) < 1e-15);
    }
    CHECK_THROWS_AS(su2_reference_data(1.0, 0.5, Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ(), 1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(su2_reference_data(0.0, 0.0, Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ(), 1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(su2_reference_data(1.0, 1.0, Eigen::Vector3d::UnitZ(), -Eigen::Vector3d::UnitZ(), 2.0, 1.0), ConfigError);
}

TEST_CASE("spinor for a prescribed jump") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector3d v(g(rng), g(rng), g(rng));
        const Eigen::Vector2cd q = spinor_for_jump(v);
        const auto J = required_jump(q);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(J[static_cast<std::size_t>(j)](0, 0) - v(j)) < 1e-14);
    }
    CHECK(spinor_for_jump(Eigen::Vector3d::Zero()).norm() == 0.0);
}

TEST_CASE("random Nahm data are valid and reproducible") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        RandomDataOptions opt;
        opt.k = 1 + seed % 2;
        opt.n = 1 + seed % 3;
        const NahmData d = random_nahm_data(seed, opt);
        CHECK(validate(d).max_residual() < 1e-10);
        CHECK(d.rank() == opt.k);
        CHECK(d.num_points() == opt.n);
        const NahmData again = random_nahm_data(seed, opt);
        CHECK(nahm_data_to_json(d) == nahm_data_to_json(again));
    }
    CHECK_THROWS_AS(gauge_transform(reference_dataset(), scalar(0.5), {0.0, 1.0}), ConfigError);
}
