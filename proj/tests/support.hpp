#pragma once

#include <random>

#include <doctest.h>

#include "caloron/oracle.hpp"

namespace caloron::testing {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> g;
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, int k) {
    const Matrix m = random_matrix(rng, k, k);
    return 0.5 * (m + m.adjoint());
}

inline Matrix scalar(cplx z) { return Matrix::Constant(1, 1, z); }

/// A random point at which both Weyl monodromies are comfortably regular.
inline FourPoint regular_point(const NahmData& data, std::mt19937_64& rng, double spread = 0.5,
                               double min_gap = 0.05) {
    std::uniform_real_distribution<double> u(-spread, spread);
    for (int attempt = 0; attempt < 200; ++attempt) {
        FourPoint t;
        for (int mu = 0; mu < 4; ++mu) t[mu] = u(rng);
        const Regularity reg = regularity(data, t);
        if (std::min(reg.gap_Ddag, reg.gap_D) > min_gap) return t;
    }
    throw Error("no regular point found");
}

inline double block_distance(const BlockMatrix& a, const BlockMatrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, max_abs(a[i][j] - b[i][j]));
    return worst;
}

} // namespace caloron::testing
