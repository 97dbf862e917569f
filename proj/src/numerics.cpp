#include "quantcub/numerics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace qcub {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(a < b)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adapt(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

bool solve_sym_tridiagonal(std::span<const double> diag, std::span<const double> off,
                           std::span<const double> rhs, std::span<double> x) {
    const std::size_t n = diag.size();
    if (n == 0 || off.size() + 1 != n || rhs.size() != n || x.size() != n)
        throw std::invalid_argument("solve_sym_tridiagonal: size mismatch");
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> b(rhs.begin(), rhs.end());
    for (std::size_t i = 1; i < n; ++i) {
        if (d[i - 1] == 0.0 || !std::isfinite(d[i - 1])) return false;
        const double w = off[i - 1] / d[i - 1];
        d[i] -= w * off[i - 1];
        b[i] -= w * b[i - 1];
    }
    if (d[n - 1] == 0.0 || !std::isfinite(d[n - 1])) return false;
    x[n - 1] = b[n - 1] / d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = (b[i] - off[i] * x[i + 1]) / d[i];
    }
    return true;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("ols_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate abscissae");
    return sxy / sxx;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  std::span<const double> y) {
    if (columns.empty()) throw std::invalid_argument("least_squares: no columns");
    const Eigen::Index rows = static_cast<Eigen::Index>(y.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (static_cast<Eigen::Index>(columns[j].size()) != rows)
            throw std::invalid_argument("least_squares: column size mismatch");
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = columns[j][i];
    }
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) b(i) = y[i];
    const auto qr = a.colPivHouseholderQr();
    if (qr.rank() < cols)
        throw std::runtime_error("least_squares: singular design");
    Eigen::VectorXd c = qr.solve(b);
    return {c.data(), c.data() + cols};
}

} // namespace qcub
