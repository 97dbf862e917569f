#include "quantcub/black_scholes.hpp"

#include "quantcub/special_functions.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace qcub {

double bs_call_price(double s0, double strike, double r, double sigma, double t) {
    if (!(s0 > 0.0)) throw std::domain_error("bs_call_price: spot must be positive");
    if (strike < 0.0) throw std::domain_error("bs_call_price: strike must be >= 0");
    const double disc = std::exp(-r * t);
    if (strike == 0.0) return s0;
    if (sigma <= 0.0 || t <= 0.0) {
        const double fwd = s0 / disc;
        return fwd > strike ? disc * (fwd - strike) : 0.0;
    }
    const double vol = sigma * std::sqrt(t);
    const double d1 = (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * t) / vol;
    const double d2 = d1 - vol;
    return s0 * normal_cdf(d1) - strike * disc * normal_cdf(d2);
}

std::vector<std::vector<double>> correlation_cholesky(const BSModel& model) {
    const int d = model.dim();
    if (d < 1) throw std::invalid_argument("BSModel: empty");
    if (static_cast<int>(model.sigmas.size()) != d ||
        static_cast<int>(model.corr.size()) != d)
        throw std::invalid_argument("BSModel: dimension mismatch");
    for (double s : model.sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("BSModel: volatilities must be positive");
    Eigen::MatrixXd c(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(model.corr[i].size()) != d)
            throw std::invalid_argument("BSModel: correlation matrix is not square");
        for (int j = 0; j < d; ++j) c(i, j) = model.corr[i][j];
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-14)
        throw std::invalid_argument("BSModel: correlation matrix is not symmetric");
    for (int i = 0; i < d; ++i)
        if (std::fabs(c(i, i) - 1.0) > 1e-14)
            throw std::invalid_argument("BSModel: correlation matrix needs a unit diagonal");
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("BSModel: correlation matrix is not positive definite");
    Eigen::MatrixXd l = llt.matrixL();
    std::vector<std::vector<double>> out(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) out[i][j] = l(i, j);
    return out;
}

void bs_terminals(const BSModel& model, const std::vector<std::vector<double>>& chol,
                  std::span<const double> z, std::span<double> out) {
    const int d = model.dim();
    const double sqt = std::sqrt(model.t);
    for (int k = 0; k < d; ++k) {
        double w = 0.0;
        for (int j = 0; j <= k; ++j) w += chol[k][j] * z[j];
        const double sig = model.sigmas[k];
        out[k] = model.s0[k] * std::exp((model.r - 0.5 * sig * sig) * model.t + sig * sqt * w);
    }
}

} // namespace qcub
