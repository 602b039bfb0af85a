#include "caloron/spin_algebra.hpp"

#include <string>

namespace caloron {

namespace {

void check_index(int mu) {
    if (mu < 0 || mu > 3)
        throw ConfigError("spin index out of range: " + std::to_string(mu));
}

void check_even(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw ConfigError("expected a square matrix of even dimension, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

} // namespace

Matrix2 pauli(int mu) {
    check_index(mu);
    Matrix2 s;
    switch (mu) {
    case 0: s << I_unit, 0.0, 0.0, I_unit; break;
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -I_unit, I_unit, 0.0; break;
    default: s << 1.0, 0.0, 0.0, -1.0; break;
    }
    return s;
}

Matrix2 quaternion_unit(int mu) { return -I_unit * pauli(mu); }

Matrix2 quaternion_conjugate(int mu) {
    return mu == 0 ? quaternion_unit(0) : Matrix2(-quaternion_unit(mu));
}

Matrix2 e_bracket(int nu, int mu) {
    return quaternion_conjugate(nu) * quaternion_unit(mu) -
           quaternion_conjugate(mu) * quaternion_unit(nu);
}

const SpinBasis& SpinBasis::instance() {
    static const SpinBasis basis = [] {
        SpinBasis b;
        for (int mu = 0; mu < 4; ++mu) {
            b.e[mu] = quaternion_unit(mu);
            b.sigma[mu] = pauli(mu);
            for (int nu = 0; nu < 4; ++nu) b.bracket[nu][mu] = e_bracket(nu, mu);
        }
        return b;
    }();
    return basis;
}

Matrix kron_spin(const Matrix2& s, const Matrix& m) {
    const Eigen::Index k = m.rows(), c = m.cols();
    Matrix out(2 * k, 2 * c);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.block(a * k, b * c, k, c) = s(a, b) * m;
    return out;
}

Matrix spin_trace(const Matrix& m) {
    check_even(m);
    const Eigen::Index k = m.rows() / 2;
    return m.topLeftCorner(k, k) + m.bottomRightCorner(k, k);
}

std::array<Matrix, 4> spin_decompose(const Matrix& m) {
    check_even(m);
    const Eigen::Index k = m.rows() / 2;
    const Matrix id = Matrix::Identity(k, k);
    std::array<Matrix, 4> parts;
    for (int mu = 0; mu < 4; ++mu)
        parts[mu] = 0.5 * spin_trace(kron_spin(quaternion_conjugate(mu), id) * m);
    return parts;
}

Matrix spin_compose(const std::array<Matrix, 4>& components) {
    Matrix out = kron_spin(quaternion_unit(0), components[0]);
    for (int mu = 1; mu < 4; ++mu) out += kron_spin(quaternion_unit(mu), components[mu]);
    return out;
}

} // namespace caloron
