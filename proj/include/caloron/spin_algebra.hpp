#pragma once

#include "caloron/types.hpp"

// Quaternion units and spin bookkeeping on S (x) E.
//
// Representation: sigma_0 = i*id, sigma_1..3 the Pauli matrices, and
// e_mu = -i sigma_mu, so e_0 = id and e_1 e_2 = e_3.  Every 2k-dimensional
// object in the library uses the spin factor as the OUTER Kronecker factor:
// block (a,b) of kron_spin(s, m) is s(a,b) * m.

namespace caloron {

Matrix2 pauli(int mu);
Matrix2 quaternion_unit(int mu);       // e_mu
Matrix2 quaternion_conjugate(int mu);  // e-bar_mu: e-bar_0 = e_0, e-bar_j = -e_j

/// e-bar_nu e_mu - e-bar_mu e_nu
Matrix2 e_bracket(int nu, int mu);

struct SpinBasis {
    std::array<Matrix2, 4> e;
    std::array<Matrix2, 4> sigma;
    std::array<std::array<Matrix2, 4>, 4> bracket;  // bracket[nu][mu] = e_bracket(nu, mu)

    static const SpinBasis& instance();
};

Matrix kron_spin(const Matrix2& s, const Matrix& m);

/// Sum of the two diagonal k x k blocks of a 2k x 2k matrix.
Matrix spin_trace(const Matrix& m);

/// Components M_mu with M = sum_mu kron_spin(e_mu, M_mu).
std::array<Matrix, 4> spin_decompose(const Matrix& m);

/// Inverse of spin_decompose.
Matrix spin_compose(const std::array<Matrix, 4>& components);

} // namespace caloron
