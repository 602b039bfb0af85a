#pragma once

#include <functional>

#include "caloron/nahm_data.hpp"

namespace caloron {

using CoefficientFn = std::function<Matrix(double s)>;

inline constexpr double default_ode_tol = 1e-10;
inline constexpr double default_regularity_threshold = 1e-6;

/// Phi(s1) for Phi' = coeff(s) Phi, Phi(s0) = initial, by adaptive
/// Dormand-Prince 5(4). The local error per step is kept below
/// tol * max(1, |Phi|_max). Deterministic for fixed inputs. s1 >= s0.
Matrix transfer(const CoefficientFn& coeff, double s0, double s1, const Matrix& initial,
                double tol = default_ode_tol);
Matrix transfer(const CoefficientFn& coeff, double s0, double s1, double tol = default_ode_tol);

enum class OperatorTag { Ddag, D, DdagD, Finv };

const char* to_string(OperatorTag tag);

/// Jump map [[I, 0], [J_alpha, I]] acting on stacked (f, f') at lambda_alpha for
/// a second-order operator:
///   Finv:   J = i Delta T_0 + 1/2 tr_S(Q Q^dag)
///   DdagD:  J = kron(id, i Delta T_0) - sum_j kron(e_j, (Q Q^dag)_j)
/// so that f'(lambda+) - f'(lambda-) = J f(lambda).
Matrix second_order_jump(const NahmData& data, const FourPoint& t, int alpha, OperatorTag tag);

/// The linear ODE of one operator on the circle: interval coefficients plus
/// jump maps at the marked points.
///
/// First-order tags integrate f' = M f with M from weyl_coefficient; solutions
/// are continuous at marked points. Second-order tags integrate the companion
/// system of L f = 0, L = (i d/ds + A)^2 + V + sum_alpha delta_alpha P_alpha,
/// tracking (f, f'):  f'' = 2i A f' + (i A' + A^2 + V) f.
/// Finv acts on E (A = T_0 + t_0, V = sum_j (T_j + t_j)^2); DdagD acts on S (x) E
/// with id (x) the same A and V (the Nahm equations remove the spin part).
class CircleFlow {
public:
    CircleFlow(const NahmData& data, const FourPoint& t, OperatorTag tag);

    const NahmData& data() const { return *data_; }
    const FourPoint& point() const { return t_; }
    OperatorTag tag() const { return tag_; }
    bool second_order() const { return tag_ == OperatorTag::DdagD || tag_ == OperatorTag::Finv; }
    /// m: dimension of the sections (k or 2k).
    int section_dimension() const;
    /// Dimension of the ODE state (m, or 2m for second-order operators).
    int state_dimension() const;

    Matrix coefficient(int interval, double s) const;
    Matrix jump(int alpha) const;

    /// Transport across all of interval a.
    Matrix interval_transfer(int a, double tol = default_ode_tol) const;

    /// Transport of `initial` from position (s0, side0) to (s1, side1), s1 >= s0
    /// in unwrapped coordinates. A jump at a marked point m is applied when the
    /// path passes from (m, left) to (m, right).
    Matrix propagate(double s0, Side side0, double s1, Side side1, const Matrix& initial,
                     double tol = default_ode_tol) const;
    Matrix propagate(double s0, Side side0, double s1, Side side1,
                     double tol = default_ode_tol) const;

private:
    const NahmData* data_;
    FourPoint t_;
    OperatorTag tag_;
};

struct Monodromy {
    Matrix matrix;
    double base_point = 0.0;
    OperatorTag operator_tag = OperatorTag::Ddag;
    FourPoint t;

    Vector eigenvalues() const;
};

/// iota_{s0+2pi, s0} of D^dag or D: concatenated interval transports, no jump factors.
Monodromy circle_monodromy_first_order(const NahmData& data, const FourPoint& t, double s0,
                                       WeylOperator which, double tol = default_ode_tol);

/// iota_{s0+2pi, s0} of DdagD or Finv on stacked (f, f'). A base point on a
/// marked point is taken on its right side, so that jump is applied last.
Monodromy circle_monodromy_second_order(const NahmData& data, const FourPoint& t, double s0,
                                        OperatorTag tag, double tol = default_ode_tol);

struct Regularity {
    double gap_Ddag = 0.0;
    double gap_D = 0.0;
    bool is_regular = false;
};

/// min |eig(iota) - 1| of the first-order monodromies of D^dag and D.
Regularity regularity(const NahmData& data, const FourPoint& t, double tol = default_ode_tol,
                      double threshold = default_regularity_threshold);

double eigenvalue_gap(const Matrix& monodromy);

} // namespace caloron
