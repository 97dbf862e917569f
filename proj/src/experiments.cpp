#include "quantcub/experiments.hpp"

#include "quantcub/cubature.hpp"
#include "quantcub/product_quant.hpp"

#include <cmath>
#include <stdexcept>

namespace qcub {

Distribution CallExperiment::lognormal_law() const {
    return Distribution::lognormal(std::log(s0) + (r - 0.5 * sigma * sigma) * t,
                                   sigma * std::sqrt(t));
}

double CallExperiment::gaussian_integrand(double z) const {
    const double st = s0 * std::exp((r - 0.5 * sigma * sigma) * t + sigma * std::sqrt(t) * z);
    return std::exp(-r * t) * std::max(st - strike, 0.0);
}

double CallExperiment::lognormal_integrand(double x) const {
    return std::exp(-r * t) * std::max(x - strike, 0.0);
}

Distribution PutOnCallExperiment::lognormal_law() const {
    return Distribution::lognormal(std::log(s0) + (r - 0.5 * sigma * sigma) * t1,
                                   sigma * std::sqrt(t1));
}

double PutOnCallExperiment::gaussian_integrand(double z) const {
    const double st1 = s0 * std::exp((r - 0.5 * sigma * sigma) * t1 + sigma * std::sqrt(t1) * z);
    return lognormal_integrand(st1);
}

double PutOnCallExperiment::lognormal_integrand(double x) const {
    const double inner = bs_call_price(x, k2, r, sigma, t2 - t1);
    return std::exp(-r * t1) * std::max(k1 - inner, 0.0);
}

double PutOnCallExperiment::refined_reference(GridStore& store) const {
    return quantized_expectation(store.get(gaussian_law(), 10000),
                                 [this](double z) { return gaussian_integrand(z); });
}

double ExchangeSpreadExperiment::integrand(double z) const {
    const double sqt = std::sqrt(t);
    const double a = s01 * std::exp(-0.5 * rho * rho * sigma1 * sigma1 * t + sigma1 * rho * sqt * z);
    const double k = s02 * std::exp((r - 0.5 * sigma2 * sigma2) * t + sigma2 * sqt * z) + strike;
    return bs_call_price(a, k, r, sigma1 * std::sqrt(1.0 - rho * rho), t);
}

double ExchangeSpreadExperiment::refined_reference(GridStore& store) const {
    return richardson_romberg(store, law(), [this](double z) { return integrand(z); }, 6000, 1.2);
}

std::vector<double> BasketExperiment::sigmas() const {
    std::vector<double> v(d);
    for (int i = 0; i < d; ++i) v[i] = static_cast<double>(i + 1) / (d + 1);
    return v;
}

std::vector<double> BasketExperiment::alphas() const {
    std::vector<double> v(d);
    for (int i = 0; i < d; ++i)
        v[i] = 2.0 * (i + 1) / (static_cast<double>(d) * (d + 1));
    return v;
}

BSModel BasketExperiment::model() const {
    BSModel m;
    m.s0.assign(d, s0);
    m.r = r;
    m.sigmas = sigmas();
    m.corr.assign(d, std::vector<double>(d, rho));
    for (int i = 0; i < d; ++i) m.corr[i][i] = 1.0;
    m.t = t;
    return m;
}

double BasketExperiment::reference(GridStore& store) const {
    const BasketExperiment def{};
    if (d == def.d && s0 == def.s0 && r == def.r && rho == def.rho && t == def.t &&
        strike == def.strike)
        return kReferenceD2;
    if (d != 2)
        throw std::invalid_argument(
            "BasketExperiment::reference: no reference available for this configuration");
    const BSModel m = model();
    const auto chol = correlation_cholesky(m);
    const auto alpha = alphas();
    ProductGrid pg;
    pg.axes.push_back(store.get(Distribution::normal(0.0, 1.0), 600));
    pg.axes.push_back(pg.axes[0]);
    const double disc = std::exp(-r * t);
    return product_expectation(pg, [&](std::span<const double> z) {
        double s[2];
        bs_terminals(m, chol, z, s);
        const double b = alpha[0] * s[0] + alpha[1] * s[1] - strike;
        return b > 0.0 ? disc * b : 0.0;
    });
}

} // namespace qcub
