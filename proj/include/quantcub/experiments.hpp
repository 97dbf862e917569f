#ifndef QUANTCUB_EXPERIMENTS_HPP
#define QUANTCUB_EXPERIMENTS_HPP

#include "quantcub/black_scholes.hpp"
#include "quantcub/distribution.hpp"
#include "quantcub/grid_store.hpp"

namespace qcub {

/// Vanilla call benchmark. The closed form is the reference; the two
/// integrand routes quantize either the driving Gaussian or the terminal
/// asset law directly.
struct CallExperiment {
    double s0 = 100.0;
    double strike = 80.0;
    double r = 0.1;
    double sigma = 0.5;
    double t = 1.0;

    double reference() const { return bs_call_price(s0, strike, r, sigma, t); }
    Distribution gaussian_law() const { return Distribution::normal(0.0, 1.0); }
    Distribution lognormal_law() const;
    double gaussian_integrand(double z) const;
    double lognormal_integrand(double x) const;
};

/// Put-on-call compound option: the payoff wraps the closed-form call
/// price of the tail leg.
struct PutOnCallExperiment {
    double s0 = 100.0;
    double r = 0.03;
    double sigma = 0.2;
    double t1 = 1.0 / 12.0;
    double t2 = 0.5;
    double k1 = 6.5;
    double k2 = 100.0;

    static constexpr double kReference = 1.3945704;

    Distribution gaussian_law() const { return Distribution::normal(0.0, 1.0); }
    Distribution lognormal_law() const;
    double gaussian_integrand(double z) const;
    double lognormal_integrand(double x) const; // x = terminal spot at t1
    /// High-accuracy reference from a level-10000 grid cubature.
    double refined_reference(GridStore& store) const;
};

/// Exchange spread on two correlated assets, reduced to a 1D integrand by
/// conditioning on the second driver.
struct ExchangeSpreadExperiment {
    double s01 = 100.0;
    double s02 = 100.0;
    double r = 0.02;
    double sigma1 = 0.5;
    double sigma2 = 0.5;
    double rho = 0.5;
    double t = 10.0;
    double strike = 10.0;

    static constexpr double kReference = 53.552678;

    Distribution law() const { return Distribution::normal(0.0, 1.0); }
    double integrand(double z) const;
    /// High-accuracy reference from an extrapolated high-level cubature.
    double refined_reference(GridStore& store) const;
};

/// Basket call benchmark on d correlated assets.
struct BasketExperiment {
    int d = 2;
    double s0 = 100.0;
    double r = 0.02;
    double rho = 0.5;
    double t = 1.0;
    double strike = 120.0;

    static constexpr double kReferenceD2 = 14.2589;

    std::vector<double> sigmas() const;
    std::vector<double> alphas() const;
    BSModel model() const;
    /// Reference value for this configuration: the benchmark constant for the
    /// default d=2 setup, otherwise a 2D product-grid cubature (d=2 only).
    double reference(GridStore& store) const;
};

} // namespace qcub

#endif
