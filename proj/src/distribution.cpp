#include "quantcub/distribution.hpp"

#include "quantcub/rng.hpp"
#include "quantcub/special_functions.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace qcub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.2831853071795864769;

// 1 - e^{-a}(1+a), the mass of t*e^{-t} on [0,a], scaled.
double expm1_poly1(double a) {
    if (a < 0.05) {
        // a^2/2 - a^3/3 + a^4/8 - a^5/30 + a^6/144 - a^7/840 + a^8/5760
        return a * a * (1.0 / 2 + a * (-1.0 / 3 + a * (1.0 / 8 + a * (-1.0 / 30 + a * (1.0 / 144 + a * (-1.0 / 840 + a / 5760))))));
    }
    return -std::expm1(-a) - a * std::exp(-a);
}

// 1 - e^{-a}(1+a+a^2/2), similar for t^2 e^{-t}.
double expm1_poly2(double a) {
    if (a < 0.05) {
        // a^3/6 - a^4/8 + a^5/20 - a^6/72 + a^7/336 - a^8/1920 + a^9/12960
        return a * a * a * (1.0 / 6 + a * (-1.0 / 8 + a * (1.0 / 20 + a * (-1.0 / 72 + a * (1.0 / 336 + a * (-1.0 / 1920 + a / 12960))))));
    }
    return 1.0 - std::exp(-a) * (1.0 + a + 0.5 * a * a);
}

} // namespace

Distribution::Distribution(DistKind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {
    switch (kind_) {
    case DistKind::normal:
        if (!(p2_ > 0.0)) throw std::invalid_argument("normal: sigma must be > 0");
        lo_ = -kInf;
        hi_ = kInf;
        mean_ = p1_;
        m2_ = p1_ * p1_ + p2_ * p2_;
        break;
    case DistKind::lognormal:
        if (!(p2_ > 0.0)) throw std::invalid_argument("lognormal: sigma must be > 0");
        lo_ = 0.0;
        hi_ = kInf;
        mean_ = std::exp(p1_ + 0.5 * p2_ * p2_);
        m2_ = std::exp(2.0 * p1_ + 2.0 * p2_ * p2_);
        break;
    case DistKind::uniform:
        if (!(p2_ > p1_)) throw std::invalid_argument("uniform: requires b > a");
        lo_ = p1_;
        hi_ = p2_;
        mean_ = 0.5 * (p1_ + p2_);
        m2_ = (p1_ * p1_ + p1_ * p2_ + p2_ * p2_) / 3.0;
        break;
    case DistKind::exponential:
        if (!(p1_ > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        lo_ = 0.0;
        hi_ = kInf;
        mean_ = 1.0 / p1_;
        m2_ = 2.0 / (p1_ * p1_);
        break;
    }
}

Distribution Distribution::normal(double mu, double sigma) { return {DistKind::normal, mu, sigma}; }
Distribution Distribution::lognormal(double mu, double sigma) { return {DistKind::lognormal, mu, sigma}; }
Distribution Distribution::uniform(double a, double b) { return {DistKind::uniform, a, b}; }
Distribution Distribution::exponential(double rate) { return {DistKind::exponential, rate, 0.0}; }

Distribution Distribution::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("distribution spec '" + spec + "': expected '<kind>:<params>'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    double a = 0.0, b = 0.0;
    const auto comma = rest.find(',');
    try {
        if (comma == std::string::npos) {
            a = std::stod(rest);
        } else {
            a = std::stod(rest.substr(0, comma));
            b = std::stod(rest.substr(comma + 1));
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("distribution spec '" + spec + "': bad parameters");
    }
    if (kind == "normal") return normal(a, b);
    if (kind == "lognormal") return lognormal(a, b);
    if (kind == "uniform") return uniform(a, b);
    if (kind == "exponential") return exponential(a);
    throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

std::string Distribution::to_string() const {
    char buf[96];
    switch (kind_) {
    case DistKind::normal:
        std::snprintf(buf, sizeof buf, "normal:%.17g,%.17g", p1_, p2_);
        break;
    case DistKind::lognormal:
        std::snprintf(buf, sizeof buf, "lognormal:%.17g,%.17g", p1_, p2_);
        break;
    case DistKind::uniform:
        std::snprintf(buf, sizeof buf, "uniform:%.17g,%.17g", p1_, p2_);
        break;
    case DistKind::exponential:
        std::snprintf(buf, sizeof buf, "exponential:%.17g", p1_);
        break;
    }
    return buf;
}

double Distribution::pdf(double x) const {
    switch (kind_) {
    case DistKind::normal:
        return normal_pdf((x - p1_) / p2_) / p2_;
    case DistKind::lognormal:
        if (x <= 0.0) return 0.0;
        return normal_pdf((std::log(x) - p1_) / p2_) / (x * p2_);
    case DistKind::uniform:
        return (x >= p1_ && x <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    case DistKind::exponential:
        return x >= 0.0 ? p1_ * std::exp(-p1_ * x) : 0.0;
    }
    return 0.0;
}

double Distribution::cdf(double x) const {
    switch (kind_) {
    case DistKind::normal:
        return normal_cdf((x - p1_) / p2_);
    case DistKind::lognormal:
        if (x <= 0.0) return 0.0;
        return normal_cdf((std::log(x) - p1_) / p2_);
    case DistKind::uniform:
        if (x <= p1_) return 0.0;
        if (x >= p2_) return 1.0;
        return (x - p1_) / (p2_ - p1_);
    case DistKind::exponential:
        return x > 0.0 ? -std::expm1(-p1_ * x) : 0.0;
    }
    return 0.0;
}

double Distribution::ccdf(double x) const {
    switch (kind_) {
    case DistKind::normal:
        return normal_ccdf((x - p1_) / p2_);
    case DistKind::lognormal:
        if (x <= 0.0) return 1.0;
        return normal_ccdf((std::log(x) - p1_) / p2_);
    case DistKind::uniform:
        if (x <= p1_) return 1.0;
        if (x >= p2_) return 0.0;
        return (p2_ - x) / (p2_ - p1_);
    case DistKind::exponential:
        return x > 0.0 ? std::exp(-p1_ * x) : 1.0;
    }
    return 0.0;
}

double Distribution::inverse_cdf(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("inverse_cdf: u must be in (0,1)");
    switch (kind_) {
    case DistKind::normal:
        return p1_ + p2_ * normal_inv_cdf(u);
    case DistKind::lognormal:
        return std::exp(p1_ + p2_ * normal_inv_cdf(u));
    case DistKind::uniform:
        return p1_ + u * (p2_ - p1_);
    case DistKind::exponential:
        return -std::log1p(-u) / p1_;
    }
    return 0.0;
}

double Distribution::partial_first_moment(double x) const {
    if (std::isinf(x)) return x > 0.0 ? mean_ : 0.0;
    switch (kind_) {
    case DistKind::normal: {
        const double z = (x - p1_) / p2_;
        return p1_ * normal_cdf(z) - p2_ * normal_pdf(z);
    }
    case DistKind::lognormal:
        if (x <= 0.0) return 0.0;
        return mean_ * normal_cdf((std::log(x) - p1_) / p2_ - p2_);
    case DistKind::uniform: {
        if (x <= p1_) return 0.0;
        if (x >= p2_) return mean_;
        return (x * x - p1_ * p1_) / (2.0 * (p2_ - p1_));
    }
    case DistKind::exponential: {
        if (x <= 0.0) return 0.0;
        const double a = p1_ * x;
        return expm1_poly1(a) / p1_;
    }
    }
    return 0.0;
}

double Distribution::density_power_integral(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("density_power_integral: p must be in (0,1)");
    switch (kind_) {
    case DistKind::normal:
        return std::pow(kTwoPi * p2_ * p2_, 0.5 * (1.0 - p)) / std::sqrt(p);
    case DistKind::lognormal:
        return std::pow(kTwoPi, 0.5 * (1.0 - p)) * std::pow(p2_, 1.0 - p) / std::sqrt(p) *
               std::exp((1.0 - p) * p1_ + (1.0 - p) * (1.0 - p) * p2_ * p2_ / (2.0 * p));
    case DistKind::uniform:
        return std::pow(p2_ - p1_, 1.0 - p);
    case DistKind::exponential:
        return std::pow(p1_, p - 1.0) / p;
    }
    return 0.0;
}

CellMoments Distribution::cell_moments(double l, double u) const {
    CellMoments cm;
    if (!(l < u)) return cm;
    switch (kind_) {
    case DistKind::normal: {
        const double zl = std::isinf(l) ? -kInf : (l - p1_) / p2_;
        const double zu = std::isinf(u) ? kInf : (u - p1_) / p2_;
        const double dl = std::isinf(zl) ? 0.0 : normal_pdf(zl);
        const double du = std::isinf(zu) ? 0.0 : normal_pdf(zu);
        cm.p = normal_interval_prob(zl, zu);
        cm.m1 = p1_ * cm.p + p2_ * (dl - du);
        const double tl = std::isinf(l) ? 0.0 : (l + p1_) * dl;
        const double tu = std::isinf(u) ? 0.0 : (u + p1_) * du;
        cm.m2 = (p1_ * p1_ + p2_ * p2_) * cm.p + p2_ * (tl - tu);
        return cm;
    }
    case DistKind::lognormal: {
        const double zl = (l <= 0.0) ? -kInf : (std::log(l) - p1_) / p2_;
        const double zu = std::isinf(u) ? kInf : (std::log(u) - p1_) / p2_;
        cm.p = normal_interval_prob(zl, zu);
        cm.m1 = mean_ * normal_interval_prob(zl - p2_, zu - p2_);
        cm.m2 = m2_ * normal_interval_prob(zl - 2.0 * p2_, zu - 2.0 * p2_);
        return cm;
    }
    case DistKind::uniform: {
        const double cl = std::min(std::max(l, p1_), p2_);
        const double cu = std::min(std::max(u, p1_), p2_);
        if (!(cl < cu)) return cm;
        const double w = p2_ - p1_;
        cm.p = (cu - cl) / w;
        cm.m1 = cm.p * 0.5 * (cu + cl);
        cm.m2 = cm.p * (cu * cu + cu * cl + cl * cl) / 3.0;
        return cm;
    }
    case DistKind::exponential: {
        const double cl = std::max(l, 0.0);
        if (std::isinf(u)) {
            const double el = std::exp(-p1_ * cl);
            cm.p = el;
            cm.m1 = el * (cl + mean_);
            cm.m2 = el * (cl * cl + 2.0 * cl * mean_ + m2_);
            return cm;
        }
        if (!(cl < u)) return cm;
        const double a = p1_ * (u - cl);
        const double el = std::exp(-p1_ * cl);
        const double e1 = -std::expm1(-a);
        const double i1 = expm1_poly1(a) / p1_;
        const double i2 = 2.0 * expm1_poly2(a) / (p1_ * p1_);
        cm.p = el * e1;
        cm.m1 = cl * cm.p + el * i1;
        cm.m2 = cl * cl * cm.p + 2.0 * cl * el * i1 + el * i2;
        return cm;
    }
    }
    return cm;
}

double Distribution::cell_distortion(double l, double u, double c) const {
    if (kind_ == DistKind::exponential) {
        // evaluate in the shifted frame to dodge the m2 cancellation
        const double cl = std::max(l, 0.0);
        if (!(cl < u)) return 0.0;
        const double el = std::exp(-p1_ * cl);
        const double d = c - cl;
        if (std::isinf(u)) {
            // int_0^inf (t-d)^2 lam e^{-lam t} dt, shifted by e^{-lam cl}
            return el * (m2_ - 2.0 * d * mean_ + d * d);
        }
        const double a = p1_ * (u - cl);
        const double e1 = -std::expm1(-a);
        const double i1 = expm1_poly1(a) / p1_;
        const double i2 = 2.0 * expm1_poly2(a) / (p1_ * p1_);
        return el * (i2 - 2.0 * d * i1 + d * d * e1);
    }
    const CellMoments cm = cell_moments(l, u);
    return cm.m2 - 2.0 * c * cm.m1 + c * c * cm.p;
}

double Distribution::sample_one(Rng& rng) const { return inverse_cdf(rng.u01()); }

std::vector<double> Distribution::sample(Rng& rng, std::size_t count) const {
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(inverse_cdf(rng.u01()));
    return out;
}

} // namespace qcub
