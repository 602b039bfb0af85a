#include "caloron/ode_monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "caloron/spin_algebra.hpp"

namespace caloron {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double marked_eps = 1e-12;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

Matrix transfer(const CoefficientFn& coeff, double s0, double s1, const Matrix& initial,
                double tol) {
    if (s1 < s0) throw ConfigError("transfer requires s1 >= s0");
    Matrix y = initial;
    const double length = s1 - s0;
    if (length == 0.0) return y;

    double s = s0;
    Matrix k1 = coeff(s) * y;
    const double scale0 = std::max(1e-3, max_abs(coeff(s)));
    double h = std::min(length, 0.5 * std::pow(tol, 0.2) / scale0);
    const double min_step = 1e-14 * std::max(1.0, std::abs(s1));
    long steps = 0;

    while (s < s1) {
        bool last = false;
        if (s + h >= s1 || s1 - (s + h) < 1e-12 * length) {
            h = s1 - s;
            last = true;
        }
        const Matrix k2 = coeff(s + c2 * h) * (y + h * (a21 * k1));
        const Matrix k3 = coeff(s + c3 * h) * (y + h * (a31 * k1 + a32 * k2));
        const Matrix k4 = coeff(s + c4 * h) * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Matrix k5 =
            coeff(s + c5 * h) * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Matrix k6 = coeff(s + h) *
                          (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Matrix ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double s_new = last ? s1 : s + h;
        Matrix k7 = coeff(s_new) * ynew;
        const Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale = tol * std::max({1.0, max_abs(y), max_abs(ynew)});
        const double ratio = max_abs(err) / scale;
        if (!std::isfinite(ratio)) throw IntegratorError("non-finite ODE state", s);
        if (ratio <= 1.0) {
            s = s_new;
            y = std::move(ynew);
            k1 = std::move(k7);
            if (last) break;
        }
        const double factor =
            ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        h *= (ratio <= 1.0) ? factor : std::min(factor, 1.0);
        if (h < min_step) throw IntegratorError("step size underflow", s);
        if (++steps > 5'000'000) throw IntegratorError("too many integration steps", s);
    }
    return y;
}

Matrix transfer(const CoefficientFn& coeff, double s0, double s1, double tol) {
    const auto dim = coeff(s0).rows();
    return transfer(coeff, s0, s1, Matrix::Identity(dim, dim), tol);
}

const char* to_string(OperatorTag tag) {
    switch (tag) {
    case OperatorTag::Ddag: return "Ddag";
    case OperatorTag::D: return "D";
    case OperatorTag::DdagD: return "DdagD";
    default: return "Finv";
    }
}

Matrix second_order_jump(const NahmData& data, const FourPoint&, int alpha, OperatorTag tag) {
    if (alpha < 0 || alpha >= data.num_points())
        throw ConfigError("marked point index out of range: " + std::to_string(alpha));
    if (tag != OperatorTag::DdagD && tag != OperatorTag::Finv)
        throw ConfigError("second_order_jump needs a second-order operator tag");
    const int n = data.num_points();
    const int prev = (alpha + n - 1) % n;
    const Matrix dT0 =
        data.T_on(alpha, 0, data.interval_start(alpha)) - data.T_on(prev, 0, data.interval_end(prev));
    const Matrix& Q = data.jump(alpha).Q;
    const Matrix QQ = Q * Q.adjoint();

    Matrix J;
    if (tag == OperatorTag::Finv) {
        J = I_unit * dT0 + 0.5 * spin_trace(QQ);
    } else {
        const auto parts = spin_decompose(QQ);
        J = kron_spin(Matrix2::Identity(), I_unit * dT0);
        for (int j = 1; j <= 3; ++j) J -= kron_spin(quaternion_unit(j), parts[static_cast<std::size_t>(j)]);
    }
    const auto m = J.rows();
    Matrix out = Matrix::Identity(2 * m, 2 * m);
    out.bottomLeftCorner(m, m) = J;
    return out;
}

CircleFlow::CircleFlow(const NahmData& data, const FourPoint& t, OperatorTag tag)
    : data_(&data), t_(t), tag_(tag) {}

int CircleFlow::section_dimension() const {
    return tag_ == OperatorTag::Finv ? data_->rank() : 2 * data_->rank();
}

int CircleFlow::state_dimension() const {
    return second_order() ? 2 * section_dimension() : section_dimension();
}

Matrix CircleFlow::coefficient(int a, double s) const {
    switch (tag_) {
    case OperatorTag::Ddag: return weyl_coefficient_on(*data_, t_, a, s, WeylOperator::Ddag);
    case OperatorTag::D: return weyl_coefficient_on(*data_, t_, a, s, WeylOperator::D);
    default: break;
    }
    const int k = data_->rank();
    const Matrix id = Matrix::Identity(k, k);
    const Matrix A = data_->T_on(a, 0, s) + t_[0] * id;
    Matrix V = A * A + I_unit * data_->dT_on(a, 0, s);
    for (int j = 1; j <= 3; ++j) {
        const Matrix Tj = data_->T_on(a, j, s) + t_[j] * id;
        V += Tj * Tj;
    }
    Matrix drift = 2.0 * I_unit * A;
    if (tag_ == OperatorTag::DdagD) {
        V = kron_spin(Matrix2::Identity(), V);
        drift = kron_spin(Matrix2::Identity(), drift);
    }
    const auto m = V.rows();
    Matrix M = Matrix::Zero(2 * m, 2 * m);
    M.topRightCorner(m, m).setIdentity();
    M.bottomLeftCorner(m, m) = V;
    M.bottomRightCorner(m, m) = drift;
    return M;
}

Matrix CircleFlow::jump(int alpha) const {
    if (!second_order()) return Matrix::Identity(state_dimension(), state_dimension());
    return second_order_jump(*data_, t_, alpha, tag_);
}

Matrix CircleFlow::interval_transfer(int a, double tol) const {
    return transfer([this, a](double s) { return coefficient(a, s); }, data_->interval_start(a),
                    data_->interval_end(a), tol);
}

Matrix CircleFlow::propagate(double s0, Side side0, double s1, Side side1, const Matrix& initial,
                             double tol) const {
    if (s1 < s0 - marked_eps) throw ConfigError("propagate requires s1 >= s0");
    const int n = data_->num_points();

    // Marked points m = lambda_alpha + 2 pi l in [s0, s1], in increasing order.
    struct Event {
        double s;
        int alpha;
    };
    std::vector<Event> events;
    const double base = data_->lambda(0);
    const int first_turn = static_cast<int>(std::floor((s0 - base) / two_pi)) - 1;
    for (int turn = first_turn;; ++turn) {
        bool past = false;
        for (int a = 0; a < n; ++a) {
            const double m = data_->lambda(a) + two_pi * turn;
            if (m > s1 + marked_eps) {
                past = true;
                break;
            }
            if (m < s0 - marked_eps) continue;
            if (std::abs(m - s0) < marked_eps && side0 == Side::right) continue;
            if (std::abs(m - s1) < marked_eps && side1 == Side::left) continue;
            events.push_back({m, a});
        }
        if (past) break;
    }

    Matrix y = initial;
    double s = s0;
    auto integrate_to = [&](double target) {
        if (target - s <= marked_eps) return;
        const double mid = 0.5 * (s + target);
        const auto [a, local] = data_->locate(mid, Side::right);
        const double shift = local - mid;
        y = transfer([this, a = a, shift](double x) { return coefficient(a, x + shift); }, s, target,
                     y, tol);
    };
    for (const auto& ev : events) {
        integrate_to(ev.s);
        s = std::max(s, ev.s);
        if (second_order()) y = jump(ev.alpha) * y;
    }
    integrate_to(s1);
    return y;
}

Matrix CircleFlow::propagate(double s0, Side side0, double s1, Side side1, double tol) const {
    const int d = state_dimension();
    return propagate(s0, side0, s1, side1, Matrix::Identity(d, d), tol);
}

Vector Monodromy::eigenvalues() const { return Eigen::ComplexEigenSolver<Matrix>(matrix).eigenvalues(); }

Monodromy circle_monodromy_first_order(const NahmData& data, const FourPoint& t, double s0,
                                       WeylOperator which, double tol) {
    const OperatorTag tag = which == WeylOperator::Ddag ? OperatorTag::Ddag : OperatorTag::D;
    CircleFlow flow(data, t, tag);
    return {flow.propagate(s0, Side::right, s0 + two_pi, Side::right, tol), s0, tag, t};
}

Monodromy circle_monodromy_second_order(const NahmData& data, const FourPoint& t, double s0,
                                        OperatorTag tag, double tol) {
    if (tag != OperatorTag::DdagD && tag != OperatorTag::Finv)
        throw ConfigError("second-order monodromy needs DdagD or Finv");
    CircleFlow flow(data, t, tag);
    return {flow.propagate(s0, Side::right, s0 + two_pi, Side::right, tol), s0, tag, t};
}

double eigenvalue_gap(const Matrix& monodromy) {
    const Vector ev = Eigen::ComplexEigenSolver<Matrix>(monodromy, false).eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) gap = std::min(gap, std::abs(ev(i) - 1.0));
    return gap;
}

Regularity regularity(const NahmData& data, const FourPoint& t, double tol, double threshold) {
    const double s0 = data.lambda(0);
    Regularity r;
    r.gap_Ddag = eigenvalue_gap(circle_monodromy_first_order(data, t, s0, WeylOperator::Ddag, tol).matrix);
    r.gap_D = eigenvalue_gap(circle_monodromy_first_order(data, t, s0, WeylOperator::D, tol).matrix);
    r.is_regular = r.gap_Ddag > threshold && r.gap_D > threshold;
    return r;
}

} // namespace caloron
