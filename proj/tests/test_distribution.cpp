#include "quantcub/distribution.hpp"

#include "quantcub/numerics.hpp"
#include "quantcub/rng.hpp"

#include <doctest.h>

#include <stdexcept>
#include <limits>
#include <algorithm>

#include <cmath>
#include <vector>

using namespace qcub;

namespace {

const double kInvSqrt2Pi = 0.3989422804014327;

std::vector<Distribution> all_kinds() {
    return {Distribution::normal(0.0, 1.0), Distribution::lognormal(0.0, 1.0),
            Distribution::uniform(0.0, 1.0), Distribution::exponential(1.0)};
}

} // namespace

TEST_CASE("pdf examples") {
    CHECK(Distribution::normal(0, 1).pdf(0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
    CHECK(Distribution::uniform(0, 1).pdf(0.3) == 1.0);
    CHECK(Distribution::lognormal(0, 1).pdf(1.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
    CHECK(Distribution::normal(0, 1).pdf(50.0) == 0.0);
    CHECK(Distribution::lognormal(0, 1).pdf(-1.0) == 0.0);
}

TEST_CASE("cdf examples") {
    CHECK(Distribution::normal(0, 1).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Distribution::uniform(0, 1).cdf(0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(Distribution::exponential(1).cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(Distribution::uniform(0, 1).cdf(-1.0) == 0.0);
    CHECK(Distribution::uniform(0, 1).cdf(2.0) == 1.0);
}

TEST_CASE("partial first moment examples") {
    const auto n01 = Distribution::normal(0, 1);
    CHECK(n01.partial_first_moment(std::numeric_limits<double>::infinity()) ==
          doctest::Approx(0.0));
    CHECK(n01.partial_first_moment(0.0) == doctest::Approx(-kInvSqrt2Pi).epsilon(1e-14));
    CHECK(Distribution::uniform(0, 1).partial_first_moment(0.5) ==
          doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("partial first moment matches adaptive integration") {
    Rng rng(20240301);
    for (const auto& d : all_kinds()) {
        const double lo_q = d.inverse_cdf(1e-13);
        for (int i = 0; i < 100; ++i) {
            const double u = 0.001 + 0.998 * rng.u01();
            const double x = d.inverse_cdf(u);
            const double oracle = integrate_adaptive(
                [&](double xi) { return xi * d.pdf(xi); }, lo_q, x, 1e-11);
            const double mine = d.partial_first_moment(x) - d.partial_first_moment(lo_q);
            CHECK(std::fabs(mine - oracle) <= 1e-8);
        }
    }
}

TEST_CASE("density power integral") {
    CHECK(Distribution::uniform(0, 1).density_power_integral(1.0 / 3) == doctest::Approx(1.0));
    // closed Gaussian form sqrt(3) (2 pi)^{1/3}
    const double expected = std::sqrt(3.0) * std::pow(2.0 * M_PI, 1.0 / 3.0);
    CHECK(Distribution::normal(0, 1).density_power_integral(1.0 / 3) ==
          doctest::Approx(expected).epsilon(1e-13));
    CHECK(Distribution::exponential(1).density_power_integral(1.0 / 3) ==
          doctest::Approx(3.0).epsilon(1e-13));
    CHECK_THROWS_AS((void)Distribution::normal(0, 1).density_power_integral(1.2),
                    std::domain_error);

    // Zador constant consistency for the standard normal
    const double i13 = Distribution::normal(0, 1).density_power_integral(1.0 / 3);
    CHECK(std::pow(i13, 3.0) / 12.0 ==
          doctest::Approx(M_PI * std::sqrt(3.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("density power integral matches quadrature") {
    // phi^p has much heavier tails than phi, so each law needs its own
    // truncation range (chosen so the discarded mass is ~1e-18)
    for (const auto& d : all_kinds()) {
        for (double p : {0.25, 1.0 / 3, 0.6}) {
            double oracle = 0.0;
            switch (d.kind()) {
            case DistKind::uniform:
                oracle = integrate_adaptive([&](double x) { return std::pow(d.pdf(x), p); },
                                            d.support_lo(), d.support_hi(), 1e-12);
                break;
            case DistKind::normal: {
                const double c = std::sqrt(2.0 * 45.0 / p);
                oracle = integrate_adaptive([&](double x) { return std::pow(d.pdf(x), p); },
                                            -c, c, 1e-12);
                break;
            }
            case DistKind::exponential: {
                const double hi = 45.0 / (p * d.param1()) + 10.0;
                oracle = integrate_adaptive([&](double x) { return std::pow(d.pdf(x), p); },
                                            0.0, hi, 1e-12);
                break;
            }
            case DistKind::lognormal: {
                // integrate in t = log x, where the integrand is Gaussian
                const double mu = d.param1(), sg = d.param2();
                const double center = mu + (1.0 - p) * sg * sg / p;
                const double half = sg * std::sqrt(2.0 * 45.0 / p);
                oracle = integrate_adaptive(
                    [&](double t) {
                        const double x = std::exp(t);
                        return std::pow(d.pdf(x), p) * x;
                    },
                    center - half, center + half, 1e-12);
                break;
            }
            }
            CHECK(d.density_power_integral(p) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("cdf derivative equals pdf") {
    Rng rng(7);
    const double h = 1e-6;
    for (const auto& d : all_kinds()) {
        for (int i = 0; i < 1000; ++i) {
            const double u = 0.001 + 0.998 * rng.u01();
            const double x = d.inverse_cdf(u);
            const double fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
            CHECK(std::fabs(fd - d.pdf(x)) <= 1e-6 * (1.0 + d.pdf(x)));
        }
    }
}

TEST_CASE("inverse cdf round trip") {
    Rng rng(99);
    for (const auto& d : all_kinds()) {
        for (int i = 0; i < 500; ++i) {
            const double u = 1e-6 + (1.0 - 1e-5 - 1e-6) * rng.u01();
            const double x = d.inverse_cdf(u);
            const double back = d.inverse_cdf(d.cdf(x));
            CHECK(std::fabs(back - x) <= 1e-10 * (1.0 + std::fabs(x)));
        }
    }
}

TEST_CASE("cdf endpoints and mean identities") {
    for (const auto& d : all_kinds()) {
        CHECK(d.cdf(d.support_lo()) == doctest::Approx(0.0));
        if (std::isfinite(d.support_hi())) CHECK(d.cdf(d.support_hi()) == doctest::Approx(1.0));
        CHECK(d.partial_first_moment(d.support_hi()) == doctest::Approx(d.mean()).epsilon(1e-14));
        const CellMoments total = d.cell_moments(d.support_lo(), d.support_hi());
        CHECK(total.p == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(total.m1 == doctest::Approx(d.mean()).epsilon(1e-14));
        CHECK(total.m2 == doctest::Approx(d.second_moment()).epsilon(1e-14));
    }
}

TEST_CASE("cell moments sum over a partition") {
    Rng rng(5);
    for (const auto& d : all_kinds()) {
        std::vector<double> cuts{d.support_lo()};
        for (int i = 1; i <= 20; ++i) cuts.push_back(d.inverse_cdf(i / 21.0));
        cuts.push_back(d.support_hi());
        double p = 0, m1 = 0, m2 = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const CellMoments cm = d.cell_moments(cuts[i], cuts[i + 1]);
            CHECK(cm.p > 0.0);
            p += cm.p;
            m1 += cm.m1;
            m2 += cm.m2;
        }
        CHECK(p == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(m1 == doctest::Approx(d.mean()).epsilon(1e-12));
        CHECK(m2 == doctest::Approx(d.second_moment()).epsilon(1e-12));
    }
}

TEST_CASE("cell moments match quadrature on random cells") {
    Rng rng(11);
    for (const auto& d : all_kinds()) {
        for (int i = 0; i < 25; ++i) {
            double ua = 0.01 + 0.98 * rng.u01();
            double ub = 0.01 + 0.98 * rng.u01();
            if (ua > ub) std::swap(ua, ub);
            if (ub - ua < 1e-3) continue;
            const double a = d.inverse_cdf(ua), b = d.inverse_cdf(ub);
            const CellMoments cm = d.cell_moments(a, b);
            const double p_q = integrate_adaptive([&](double x) { return d.pdf(x); }, a, b, 1e-12);
            const double m2_q =
                integrate_adaptive([&](double x) { return x * x * d.pdf(x); }, a, b, 1e-12);
            CHECK(cm.p == doctest::Approx(p_q).epsilon(1e-9));
            CHECK(std::fabs(cm.m2 - m2_q) <= 1e-9 * (1.0 + std::fabs(m2_q)));
            const double c = 0.5 * (a + b);
            const double cd_q = integrate_adaptive(
                [&](double x) { return (x - c) * (x - c) * d.pdf(x); }, a, b, 1e-13);
            CHECK(std::fabs(d.cell_distortion(a, b, c) - cd_q) <=
                  1e-10 * (1.0 + std::fabs(cd_q)));
        }
    }
}

TEST_CASE("sampling") {
    const auto n01 = Distribution::normal(0, 1);
    Rng rng(42);
    CHECK(n01.sample(rng, 0).empty());

    const std::size_t n = 1'000'000;
    const auto draws = n01.sample(rng, n);
    double mean = 0.0;
    for (double v : draws) mean += v;
    mean /= static_cast<double>(n);
    CHECK(std::fabs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));

    Rng rng2(42);
    const auto u = Distribution::uniform(0, 1).sample(rng2, n);
    double mx = 0.0;
    for (double v : u) mx = std::max(mx, v);
    CHECK(mx <= 1.0);
    CHECK(mx > 0.99999);

    // bit reproducibility given the state
    Rng a(123), b(123);
    CHECK(n01.sample(a, 16) == n01.sample(b, 16));
    Rng c(123, 1);
    CHECK(n01.sample(c, 16) != n01.sample(b, 16));
}

TEST_CASE("parse and format") {
    const auto d = Distribution::parse("normal:0,1");
    CHECK(d.kind() == DistKind::normal);
    CHECK(d.to_string() == "normal:0,1");
    CHECK(Distribution::parse("lognormal:0.075,0.5").param2() == doctest::Approx(0.5));
    CHECK(Distribution::parse("exponential:1").kind() == DistKind::exponential);
    CHECK_THROWS_AS((void)Distribution::parse("weibull:1,2"), std::invalid_argument);
    CHECK_THROWS_AS((void)Distribution::parse("normal"), std::invalid_argument);
    CHECK_THROWS_AS((void)Distribution::parse("normal:0,-1"), std::invalid_argument);
    CHECK_THROWS_AS((void)Distribution::parse("uniform:1,0"), std::invalid_argument);
    CHECK_THROWS_AS((void)Distribution::parse("exponential:0"), std::invalid_argument);
}
