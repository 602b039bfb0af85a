#pragma once

#include <functional>

#include "caloron/types.hpp"

namespace caloron {

struct QuadratureResult {
    Matrix value;
    double error = 0.0;
    int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of a matrix-valued
/// function on [a, b]. Subintervals are bisected until the summed error
/// estimate max|K15 - G7| drops below tol * max(1, max|integral|).
QuadratureResult integrate(const std::function<Matrix(double)>& f, double a, double b, double tol,
                           int max_subdivisions = 2000);

} // namespace caloron
