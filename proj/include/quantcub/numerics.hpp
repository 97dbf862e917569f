#ifndef QUANTCUB_NUMERICS_HPP
#define QUANTCUB_NUMERICS_HPP

#include <functional>
#include <span>
#include <vector>

namespace qcub {

/// Kahan-compensated accumulator.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// Adaptive Simpson quadrature to an absolute tolerance. Endpoints must be
/// finite; callers map infinite ranges themselves.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 60);

/// Solve a symmetric tridiagonal system (diag, off) x = rhs in place via
/// LDL^T without pivoting. Returns false on a vanishing pivot.
bool solve_sym_tridiagonal(std::span<const double> diag, std::span<const double> off,
                           std::span<const double> rhs, std::span<double> x);

/// Least-squares slope of y against x. Requires >= 2 points.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Weighted per-column least squares without intercept: find c minimizing
/// ||A c - y||^2 for a dense column-major A. Throws on a singular system.
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  std::span<const double> y);

} // namespace qcub

#endif
