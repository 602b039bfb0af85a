#include "caloron/quadrature.hpp"

#include <algorithm>
#include <queue>
#include <vector>

namespace caloron {

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b;
    Matrix value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gauss_kronrod(const std::function<Matrix(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Matrix fc = f(c);
    Matrix kronrod = wgk[7] * fc;
    Matrix gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const Matrix f1 = f(c - h * xgk[j]);
        const Matrix f2 = f(c + h * xgk[j]);
        kronrod += wgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
    }
    kronrod *= h;
    gauss *= h;
    const double err = (kronrod - gauss).cwiseAbs().maxCoeff();
    return {a, b, std::move(kronrod), err};
}

} // namespace

QuadratureResult integrate(const std::function<Matrix(double)>& f, double a, double b, double tol,
                           int max_subdivisions) {
    std::priority_queue<Piece> heap;
    Piece first = gauss_kronrod(f, a, b);
    QuadratureResult result{first.value, first.error, 15};
    heap.push(std::move(first));
    for (int iter = 0; iter < max_subdivisions; ++iter) {
        const double scale = std::max(1.0, result.value.cwiseAbs().maxCoeff());
        if (result.error <= tol * scale) break;
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Piece left = gauss_kronrod(f, worst.a, mid);
        Piece right = gauss_kronrod(f, mid, worst.b);
        result.evaluations += 30;
        result.value += left.value + right.value - worst.value;
        result.error += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }
    // Re-sum to shed accumulated cancellation in the running total.
    Matrix total = Matrix::Zero(result.value.rows(), result.value.cols());
    double err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    result.value = std::move(total);
    result.error = err;
    return result;
}

} // namespace caloron
