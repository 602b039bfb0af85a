#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "caloron/types.hpp"

namespace caloron {

enum class Side { left, right };
enum class WeylOperator { Ddag, D };

/// T_0..T_3 on one interval as Chebyshev series in x in [-1, 1], where x is
/// the affine image of the interval. Degree 0 is piecewise-constant data.
struct IntervalModel {
    int degree = 0;
    std::array<std::vector<Matrix>, 4> coeffs;  // coeffs[mu][p], k x k

    Matrix value(int mu, double x) const;
    Matrix derivative(int mu, double x) const;  // d/dx
};

/// Boundary map Q_alpha : W_alpha -> (S (x) E)_{lambda_alpha}, a 2k x w matrix.
struct JumpData {
    Matrix Q;
    int width() const { return static_cast<int>(Q.cols()); }
};

/// Nahm data on the circle of circumference 2*pi with n marked points.
///
/// Marked points and intervals are indexed from 0. Interval a spans
/// [lambda_a, lambda_{a+1}], and the last interval wraps to lambda_0 + 2*pi.
class NahmData {
public:
    NahmData(int k, std::vector<double> lambdas, std::vector<IntervalModel> intervals,
             std::vector<JumpData> jumps, std::string description = {});

    int rank() const { return k_; }
    int num_points() const { return static_cast<int>(lambdas_.size()); }
    const std::vector<double>& lambdas() const { return lambdas_; }
    double lambda(int alpha) const;  // any integer alpha, lambda_{alpha+n} = lambda_alpha + 2 pi
    double interval_start(int a) const { return lambda(a); }
    double interval_end(int a) const { return lambda(a + 1); }
    double interval_length(int a) const { return interval_end(a) - interval_start(a); }

    const IntervalModel& interval(int a) const { return intervals_.at(static_cast<std::size_t>(a)); }
    const JumpData& jump(int alpha) const { return jumps_.at(static_cast<std::size_t>(alpha)); }
    const std::vector<IntervalModel>& intervals() const { return intervals_; }
    const std::vector<JumpData>& jumps() const { return jumps_; }
    const std::string& description() const { return description_; }

    /// N = sum_alpha dim W_alpha.
    int boundary_dimension() const;
    /// Row offset of W_alpha inside W_Lambda.
    int boundary_offset(int alpha) const;

    /// Interval containing s (mod 2 pi) and the unwrapped coordinate of s in
    /// that interval. At s = lambda_alpha the side picks the adjacent interval.
    std::pair<int, double> locate(double s, Side side) const;

    /// T_mu (or dT_mu/ds) on interval a at coordinate s in [lambda_a, lambda_{a+1}].
    Matrix T_on(int a, int mu, double s) const;
    Matrix dT_on(int a, int mu, double s) const;

    Matrix T(int mu, double s, Side side = Side::right) const;
    Matrix dT(int mu, double s, Side side = Side::right) const;

    /// Index of the marked point within 1e-12 of s (mod 2 pi), or -1.
    int marked_point_at(double s) const;

private:
    double to_chebyshev(int a, double s) const;

    int k_;
    std::vector<double> lambdas_;
    std::vector<IntervalModel> intervals_;
    std::vector<JumpData> jumps_;
    std::string description_;
};

// --- configuration files ---------------------------------------------------

NahmData nahm_data_from_json(const nlohmann::json& doc);
NahmData load_nahm_data(const std::filesystem::path& path);
nlohmann::json nahm_data_to_json(const NahmData& data);

// --- construction helpers --------------------------------------------------

/// Chebyshev interpolant of degree `degree` of a k x k hermitian matrix
/// function per mu on [a, b].
IntervalModel fit_interval(const std::function<Matrix(int mu, double s)>& f, double a, double b,
                           int degree);

/// Piecewise-constant data; values[a][mu] is T_mu on interval a.
NahmData constant_nahm_data(int k, std::vector<double> lambdas,
                            const std::vector<std::array<Matrix, 4>>& values,
                            std::vector<JumpData> jumps, std::string description = {});

// --- Nahm equations -------------------------------------------------------

/// Required jump i (Q Q^dag)_j, j = 1..3, of T_j at a marked point.
std::array<Matrix, 3> required_jump(const Matrix& Q);

/// Interior defect R_j = i T_j' + [T_0, T_j] - [T_{j+1}, T_{j+2}]: the
/// e_j-component of the smooth part of D^dag D. Throws at marked points.
std::array<Matrix, 3> nahm_residual(const NahmData& data, double s);

/// Delta-part defect: Delta T_j(lambda_alpha) - i (Q_alpha Q_alpha^dag)_j.
std::array<Matrix, 3> matching_residual(const NahmData& data, int alpha);

struct ValidationReport {
    std::vector<double> interval_residual;  // max over samples of ||R||, per interval
    std::vector<double> matching;           // ||M|| per marked point
    double max_residual() const;
};

ValidationReport validate(const NahmData& data, int samples_per_interval = 50);

/// Coefficient M(s) of the kernel ODE f' = M f of D^dag (or D):
///   D^dag:  M = kron(id, i(T_0 + t_0)) - sum_j kron(sigma_j, T_j + t_j)
///   D:      M = kron(id, i(T_0 + t_0)) + sum_j kron(sigma_j, T_j + t_j)
/// D^dag f = i f' + (T_0 + t_0) f - sum_j e_j (T_j + t_j) f and -i e_j = -sigma_j.
Matrix weyl_coefficient(const NahmData& data, const FourPoint& t, double s, Side side,
                        WeylOperator which);
Matrix weyl_coefficient_on(const NahmData& data, const FourPoint& t, int a, double s,
                           WeylOperator which);

} // namespace caloron
