#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace caloron {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr cplx I_unit{0.0, 1.0};

/// Spacetime point t = (t_0, t_1, t_2, t_3); t_0 runs along the dual circle.
struct FourPoint {
    std::array<double, 4> t{0.0, 0.0, 0.0, 0.0};

    double operator[](int mu) const { return t.at(static_cast<std::size_t>(mu)); }
    double& operator[](int mu) { return t.at(static_cast<std::size_t>(mu)); }

    /// t + step * e_mu
    FourPoint shifted(int mu, double step) const {
        FourPoint r = *this;
        r[mu] += step;
        return r;
    }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (config schema, dimensions, indices).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The ODE integrator could not meet its tolerance.
class IntegratorError : public Error {
public:
    IntegratorError(const std::string& what, double location)
        : Error(what + " at s=" + std::to_string(location)), location_(location) {}
    double location() const { return location_; }

private:
    double location_;
};

/// The spacetime point lies on (or numerically at) the exceptional set.
class IrregularPoint : public Error {
public:
    IrregularPoint(const std::string& what, double gap) : Error(what), gap_(gap) {}
    double gap() const { return gap_; }

private:
    double gap_;
};

/// id - Q^dag F Q failed to be positive definite.
class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

} // namespace caloron
