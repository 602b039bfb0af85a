#include "caloron/nahm_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "caloron/spin_algebra.hpp"

namespace caloron {

namespace {

constexpr double marked_eps = 1e-12;

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double antihermitian_defect(const Matrix& m) { return (0.5 * (m - m.adjoint())).norm(); }

// Clenshaw summation of sum_p c_p T_p(x).
Matrix clenshaw(const std::vector<Matrix>& c, double x) {
    const auto d = static_cast<int>(c.size()) - 1;
    Matrix b1 = Matrix::Zero(c[0].rows(), c[0].cols());
    Matrix b2 = b1;
    for (int p = d; p >= 1; --p) {
        Matrix b0 = c[static_cast<std::size_t>(p)] + 2.0 * x * b1 - b2;
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    return c[0] + x * b1 - b2;
}

} // namespace

Matrix IntervalModel::value(int mu, double x) const {
    return clenshaw(coeffs.at(static_cast<std::size_t>(mu)), x);
}

Matrix IntervalModel::derivative(int mu, double x) const {
    const auto& c = coeffs.at(static_cast<std::size_t>(mu));
    const Eigen::Index k = c[0].rows();
    if (degree == 0) return Matrix::Zero(k, k);
    // d/dx coefficients: c'_{p-1} = c'_{p+1} + 2 p c_p, with c'_0 halved.
    std::vector<Matrix> dc(static_cast<std::size_t>(degree), Matrix::Zero(k, k));
    for (int p = degree; p >= 1; --p) {
        Matrix next = (p + 1 <= degree - 1) ? dc[static_cast<std::size_t>(p + 1)] : Matrix::Zero(k, k);
        dc[static_cast<std::size_t>(p - 1)] = next + 2.0 * p * c[static_cast<std::size_t>(p)];
    }
    dc[0] *= 0.5;
    return clenshaw(dc, x);
}

NahmData::NahmData(int k, std::vector<double> lambdas, std::vector<IntervalModel> intervals,
                   std::vector<JumpData> jumps, std::string description)
    : k_(k), lambdas_(std::move(lambdas)), intervals_(std::move(intervals)),
      jumps_(std::move(jumps)), description_(std::move(description)) {
    if (k_ < 1) throw ConfigError("rank k must be positive");
    const auto n = lambdas_.size();
    if (n == 0) throw ConfigError("at least one marked point is required");
    for (std::size_t a = 0; a < n; ++a) {
        if (!(lambdas_[a] >= 0.0 && lambdas_[a] < two_pi))
            throw ConfigError("lambdas must lie in [0, 2pi)");
        if (a > 0 && !(lambdas_[a] > lambdas_[a - 1]))
            throw ConfigError("lambdas not strictly increasing");
    }
    if (intervals_.size() != n)
        throw ConfigError("expected " + std::to_string(n) + " intervals, got " +
                          std::to_string(intervals_.size()));
    if (jumps_.size() != n)
        throw ConfigError("expected " + std::to_string(n) + " boundary matrices Q, got " +
                          std::to_string(jumps_.size()));
    for (std::size_t a = 0; a < n; ++a) {
        auto& iv = intervals_[a];
        if (iv.degree < 0) throw ConfigError("negative Chebyshev degree");
        for (int mu = 0; mu < 4; ++mu) {
            auto& c = iv.coeffs[static_cast<std::size_t>(mu)];
            if (c.size() != static_cast<std::size_t>(iv.degree + 1))
                throw ConfigError("interval " + std::to_string(a) + ", T_" + std::to_string(mu) +
                                  ": expected " + std::to_string(iv.degree + 1) +
                                  " coefficient matrices");
            for (auto& m : c) {
                if (m.rows() != k_ || m.cols() != k_)
                    throw ConfigError("coefficient matrix is not k x k");
                if (antihermitian_defect(m) > 1e-10 * std::max(1.0, m.norm()))
                    throw ConfigError("non-hermitian coefficient in interval " + std::to_string(a) +
                                      ", T_" + std::to_string(mu));
                m = hermitian_part(m);
            }
        }
        const auto& q = jumps_[a].Q;
        if (q.rows() != 2 * k_)
            throw ConfigError("Q_" + std::to_string(a) + " must have 2k rows");
        if (q.cols() < 1) throw ConfigError("Q_" + std::to_string(a) + " must have w >= 1 columns");
    }
}

double NahmData::lambda(int alpha) const {
    const int n = num_points();
    const int q = (alpha >= 0) ? alpha / n : -((-alpha + n - 1) / n);
    return lambdas_[static_cast<std::size_t>(alpha - q * n)] + two_pi * q;
}

int NahmData::boundary_dimension() const {
    int total = 0;
    for (const auto& j : jumps_) total += j.width();
    return total;
}

int NahmData::boundary_offset(int alpha) const {
    int off = 0;
    for (int b = 0; b < alpha; ++b) off += jumps_[static_cast<std::size_t>(b)].width();
    return off;
}

std::pair<int, double> NahmData::locate(double s, Side side) const {
    const int n = num_points();
    const double base = lambdas_[0];
    double r = base + std::fmod(s - base, two_pi);
    if (r < base) r += two_pi;
    if (std::abs(r - (base + two_pi)) < marked_eps) r = base;
    int a = n - 1;
    for (int b = 0; b < n; ++b) {
        if (r < lambda(b + 1) - marked_eps) {
            a = b;
            break;
        }
    }
    if (std::abs(r - lambda(a + 1)) < marked_eps) {  // snap to the next marked point
        a = (a + 1) % n;
        r = lambdas_[static_cast<std::size_t>(a)];
    }
    if (std::abs(r - lambda(a)) < marked_eps) {
        if (side == Side::left) {
            const int prev = (a + n - 1) % n;
            return {prev, lambda(prev + 1)};
        }
        return {a, lambda(a)};
    }
    return {a, r};
}

int NahmData::marked_point_at(double s) const {
    for (int a = 0; a < num_points(); ++a) {
        double d = std::fmod(std::abs(s - lambdas_[static_cast<std::size_t>(a)]), two_pi);
        if (d < marked_eps || two_pi - d < marked_eps) return a;
    }
    return -1;
}

double NahmData::to_chebyshev(int a, double s) const {
    const double lo = interval_start(a), hi = interval_end(a);
    return std::clamp((2.0 * s - lo - hi) / (hi - lo), -1.0, 1.0);
}

Matrix NahmData::T_on(int a, int mu, double s) const {
    return interval(a).value(mu, to_chebyshev(a, s));
}

Matrix NahmData::dT_on(int a, int mu, double s) const {
    return interval(a).derivative(mu, to_chebyshev(a, s)) * (2.0 / interval_length(a));
}

Matrix NahmData::T(int mu, double s, Side side) const {
    auto [a, r] = locate(s, side);
    return T_on(a, mu, r);
}

Matrix NahmData::dT(int mu, double s, Side side) const {
    auto [a, r] = locate(s, side);
    return dT_on(a, mu, r);
}

IntervalModel fit_interval(const std::function<Matrix(int mu, double s)>& f, double a, double b,
                           int degree) {
    IntervalModel model;
    model.degree = degree;
    const int m = degree + 1;
    std::vector<double> nodes(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) nodes[static_cast<std::size_t>(j)] = std::cos(std::numbers::pi * (j + 0.5) / m);
    for (int mu = 0; mu < 4; ++mu) {
        std::vector<Matrix> samples;
        samples.reserve(nodes.size());
        for (double x : nodes) samples.push_back(f(mu, 0.5 * (a + b) + 0.5 * (b - a) * x));
        auto& c = model.coeffs[static_cast<std::size_t>(mu)];
        c.assign(static_cast<std::size_t>(m), Matrix::Zero(samples[0].rows(), samples[0].cols()));
        for (int p = 0; p < m; ++p) {
            for (int j = 0; j < m; ++j)
                c[static_cast<std::size_t>(p)] +=
                    samples[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * p * (j + 0.5) / m);
            c[static_cast<std::size_t>(p)] *= (p == 0 ? 1.0 : 2.0) / m;
            c[static_cast<std::size_t>(p)] = hermitian_part(c[static_cast<std::size_t>(p)]);
        }
    }
    return model;
}

NahmData constant_nahm_data(int k, std::vector<double> lambdas,
                            const std::vector<std::array<Matrix, 4>>& values,
                            std::vector<JumpData> jumps, std::string description) {
    std::vector<IntervalModel> intervals;
    for (const auto& v : values) {
        IntervalModel m;
        m.degree = 0;
        for (int mu = 0; mu < 4; ++mu) m.coeffs[static_cast<std::size_t>(mu)] = {v[static_cast<std::size_t>(mu)]};
        intervals.push_back(std::move(m));
    }
    return NahmData(k, std::move(lambdas), std::move(intervals), std::move(jumps),
                    std::move(description));
}

std::array<Matrix, 3> required_jump(const Matrix& Q) {
    auto parts = spin_decompose(Q * Q.adjoint());
    return {I_unit * parts[1], I_unit * parts[2], I_unit * parts[3]};
}

std::array<Matrix, 3> nahm_residual(const NahmData& data, double s) {
    if (data.marked_point_at(s) >= 0)
        throw ConfigError("nahm_residual evaluated at a marked point; use matching_residual");
    auto [a, r] = data.locate(s, Side::right);
    std::array<Matrix, 4> T;
    for (int mu = 0; mu < 4; ++mu) T[static_cast<std::size_t>(mu)] = data.T_on(a, mu, r);
    std::array<Matrix, 3> out;
    for (int j = 1; j <= 3; ++j) {
        const Matrix& Tj = T[static_cast<std::size_t>(j)];
        const Matrix& Tj1 = T[static_cast<std::size_t>(j % 3 + 1)];
        const Matrix& Tj2 = T[static_cast<std::size_t>((j + 1) % 3 + 1)];
        out[static_cast<std::size_t>(j - 1)] =
            I_unit * data.dT_on(a, j, r) + commutator(T[0], Tj) - commutator(Tj1, Tj2);
    }
    return out;
}

std::array<Matrix, 3> matching_residual(const NahmData& data, int alpha) {
    if (alpha < 0 || alpha >= data.num_points())
        throw ConfigError("marked point index out of range: " + std::to_string(alpha));
    const int n = data.num_points();
    const int prev = (alpha + n - 1) % n;
    const auto need = required_jump(data.jump(alpha).Q);
    std::array<Matrix, 3> out;
    for (int j = 1; j <= 3; ++j) {
        Matrix right = data.T_on(alpha, j, data.interval_start(alpha));
        Matrix left = data.T_on(prev, j, data.interval_end(prev));
        out[static_cast<std::size_t>(j - 1)] = right - left - need[static_cast<std::size_t>(j - 1)];
    }
    return out;
}

double ValidationReport::max_residual() const {
    double m = 0.0;
    for (double v : interval_residual) m = std::max(m, v);
    for (double v : matching) m = std::max(m, v);
    return m;
}

ValidationReport validate(const NahmData& data, int samples_per_interval) {
    ValidationReport report;
    for (int a = 0; a < data.num_points(); ++a) {
        double worst = 0.0;
        const double lo = data.interval_start(a), len = data.interval_length(a);
        for (int i = 0; i < samples_per_interval; ++i) {
            const double s = lo + len * (i + 0.5) / samples_per_interval;
            auto r = nahm_residual(data, s);
            double norm = 0.0;
            for (const auto& m : r) norm += m.squaredNorm();
            worst = std::max(worst, std::sqrt(norm));
        }
        report.interval_residual.push_back(worst);
        auto m = matching_residual(data, a);
        report.matching.push_back(
            std::sqrt(m[0].squaredNorm() + m[1].squaredNorm() + m[2].squaredNorm()));
    }
    return report;
}

Matrix weyl_coefficient_on(const NahmData& data, const FourPoint& t, int a, double s,
                           WeylOperator which) {
    const int k = data.rank();
    const Matrix id = Matrix::Identity(k, k);
    Matrix M = kron_spin(Matrix2::Identity(), I_unit * (data.T_on(a, 0, s) + t[0] * id));
    const double sign = which == WeylOperator::Ddag ? -1.0 : 1.0;
    for (int j = 1; j <= 3; ++j)
        M += sign * kron_spin(pauli(j), data.T_on(a, j, s) + t[j] * id);
    return M;
}

Matrix weyl_coefficient(const NahmData& data, const FourPoint& t, double s, Side side,
                        WeylOperator which) {
    auto [a, r] = data.locate(s, side);
    return weyl_coefficient_on(data, t, a, r, which);
}

} // namespace caloron
