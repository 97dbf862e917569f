#ifndef QUANTCUB_DISTRIBUTION_HPP
#define QUANTCUB_DISTRIBUTION_HPP

#include <string>
#include <vector>

namespace qcub {

class Rng;

enum class DistKind { normal, lognormal, uniform, exponential };

/// First three raw moments of the law restricted to an interval (l, u]:
///   p  = P(l < X <= u)
///   m1 = int_l^u x  phi(x) dx
///   m2 = int_l^u x^2 phi(x) dx
/// Evaluated through whichever tail of the CDF keeps the difference
/// cancellation-free, so they stay accurate even for cells of probability
/// ~1e-12 deep in a tail.
struct CellMoments {
    double p = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
};

/// A 1D absolutely continuous law with closed-form density, CDF, inverse
/// CDF and partial moments. These analytic kernels are what give the grid
/// optimizer exact gradients.
class Distribution {
  public:
    static Distribution normal(double mu, double sigma);
    static Distribution lognormal(double mu, double sigma);
    static Distribution uniform(double a, double b);
    static Distribution exponential(double rate);

    /// Parse a CLI-style spec, e.g. "normal:0,1" or "exponential:1".
    static Distribution parse(const std::string& spec);
    std::string to_string() const;

    DistKind kind() const { return kind_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    /// Support endpoints in the extended reals.
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }

    double mean() const { return mean_; }
    double second_moment() const { return m2_; }
    double variance() const { return m2_ - mean_ * mean_; }

    double pdf(double x) const;
    double cdf(double x) const;
    /// P(X > x), accurate in the right tail.
    double ccdf(double x) const;
    double inverse_cdf(double u) const;

    /// K(x) = int_{-inf}^x xi phi(xi) dxi.
    double partial_first_moment(double x) const;

    /// int phi^p dlambda for p in (0,1); closed form for every kind here.
    double density_power_integral(double p) const;

    /// Moments of the law over the interval (l, u]; endpoints may be the
    /// support bounds (including +-infinity).
    CellMoments cell_moments(double l, double u) const;

    /// int_(l,u] (xi - c)^2 phi(xi) dxi.
    double cell_distortion(double l, double u, double c) const;

    /// i.i.d. draws via the inverse CDF; bit-reproducible given the
    /// generator state.
    std::vector<double> sample(Rng& rng, std::size_t count) const;
    double sample_one(Rng& rng) const;

    bool operator==(const Distribution& o) const {
        return kind_ == o.kind_ && p1_ == o.p1_ && p2_ == o.p2_;
    }

  private:
    Distribution(DistKind k, double p1, double p2);

    DistKind kind_;
    double p1_, p2_;
    double lo_, hi_;
    double mean_, m2_;
};

} // namespace qcub

#endif
