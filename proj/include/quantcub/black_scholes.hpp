#ifndef QUANTCUB_BLACK_SCHOLES_HPP
#define QUANTCUB_BLACK_SCHOLES_HPP

#include <span>
#include <vector>

namespace qcub {

/// European call under geometric Brownian dynamics. Degenerate inputs
/// (zero volatility or maturity, non-positive strike) collapse to the
/// discounted forward intrinsic value.
double bs_call_price(double s0, double strike, double r, double sigma, double t);

/// Correlated geometric Brownian terminal model.
struct BSModel {
    std::vector<double> s0;
    double r = 0.0;
    std::vector<double> sigmas;
    std::vector<std::vector<double>> corr;
    double t = 1.0;

    int dim() const { return static_cast<int>(s0.size()); }
};

/// Lower-triangular square root of the correlation matrix. Throws
/// std::invalid_argument if the matrix is not symmetric with unit diagonal
/// or fails to factor.
std::vector<std::vector<double>> correlation_cholesky(const BSModel& model);

/// S_T^k = s0_k exp((r - sigma_k^2/2) T + sigma_k sqrt(T) (L z)_k) for iid
/// standard normal z.
void bs_terminals(const BSModel& model, const std::vector<std::vector<double>>& chol,
                  std::span<const double> z, std::span<double> out);

} // namespace qcub

#endif
