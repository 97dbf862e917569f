#include "quantcub/product_quant.hpp"

#include "quantcub/cubature.hpp"

#include <doctest.h>

#include <stdexcept>
#include <algorithm>

#include <cmath>

using namespace qcub;

TEST_CASE("product expectation basics") {
    GridStore store;
    const auto n01 = Distribution::normal(0, 1);
    ProductGrid pg;
    pg.axes.push_back(store.get(n01, 40));
    pg.axes.push_back(store.get(n01, 60));

    CHECK(product_expectation(pg, [](std::span<const double>) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(product_expectation(
              pg, [](std::span<const double> x) { return x[0] * x[1]; })) <= 1e-9);
}

TEST_CASE("x^2+y^2 error equals the sum of the axis distortions") {
    GridStore store;
    const auto n01 = Distribution::normal(0, 1);
    ProductGrid pg;
    pg.axes.push_back(store.get(n01, 50));
    pg.axes.push_back(store.get(n01, 80));
    const double est = product_expectation(
        pg, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; });
    const double expected_err = pg.axes[0].distortion + pg.axes[1].distortion;
    CHECK(2.0 - est == doctest::Approx(expected_err).epsilon(1e-9));
}

TEST_CASE("marginal consistency with 1D cubature") {
    GridStore store;
    ProductGrid pg;
    pg.axes.push_back(store.get(Distribution::normal(0, 1), 35));
    pg.axes.push_back(store.get(Distribution::exponential(1), 45));
    auto call = [](double x) { return std::max(x - 0.5, 0.0); };
    const double joint =
        product_expectation(pg, [&](std::span<const double> x) { return call(x[1]); });
    const double marginal = quantized_expectation(pg.axes[1], call);
    CHECK(joint == doctest::Approx(marginal).epsilon(1e-12));
}

TEST_CASE("size caps") {
    GridStore store;
    const auto n01 = Distribution::normal(0, 1);
    ProductGrid too_many;
    for (int i = 0; i < 7; ++i) too_many.axes.push_back(store.get(n01, 2));
    CHECK_THROWS_AS((void)product_expectation(too_many, [](std::span<const double>) { return 1.0; }),
                    std::invalid_argument);

    ProductGrid too_big;
    for (int i = 0; i < 4; ++i) too_big.axes.push_back(store.get(n01, 100));
    CHECK_THROWS_WITH_AS((void)product_expectation(too_big,
                                                   [](std::span<const double>) { return 1.0; }),
                         doctest::Contains("Monte Carlo"), std::invalid_argument);
}

TEST_CASE("expansion check fits the axis coefficients") {
    GridStore store;
    const auto n01 = Distribution::normal(0, 1);
    const std::vector<Distribution> dists{n01, n01};
    const std::vector<std::vector<int>> levels{{50, 100, 200}, {50, 100, 200}};
    const double q2 = M_PI * std::sqrt(3.0) / 2.0;

    auto f2 = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    const ExpansionCheck chk = expansion_check(store, dists, levels, f2, 2.0);
    REQUIRE(chk.coefficients.size() == 2);
    CHECK(chk.coefficients[0] == doctest::Approx(q2).epsilon(0.05));
    CHECK(chk.coefficients[1] == doctest::Approx(q2).epsilon(0.05));
    CHECK(chk.rows.size() == 9);

    // the remainder against the asymptotic coefficients (c_k = q2 exactly
    // for x^2 + y^2) decays faster than 1/min(N)^2
    auto remainder = [&](int n) {
        ProductGrid pg;
        pg.axes.push_back(store.get(n01, n));
        pg.axes.push_back(pg.axes[0]);
        const double err = 2.0 - product_expectation(pg, f2);
        return std::fabs(err - 2.0 * q2 / (static_cast<double>(n) * n));
    };
    CHECK(remainder(200) < remainder(50) * (50.0 * 50.0) / (200.0 * 200.0));

    // first-order term vanishes by stationarity
    auto fx = [](std::span<const double> x) { return x[0]; };
    const ExpansionCheck lin = expansion_check(store, dists, levels, fx, 0.0);
    CHECK(std::fabs(lin.coefficients[0]) <= 1e-5);
    CHECK(std::fabs(lin.coefficients[1]) <= 1e-5);
}

TEST_CASE("anisotropic levels expose the dominant axis") {
    GridStore store;
    const auto n01 = Distribution::normal(0, 1);
    const std::vector<Distribution> dists{n01, n01};
    const std::vector<std::vector<int>> levels{{50, 100, 200}, {50, 100, 200}};
    auto f2 = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    const ExpansionCheck chk = expansion_check(store, dists, levels, f2, 2.0);
    const double c1 = chk.coefficients[0], c2 = chk.coefficients[1];
    // with N1=50, N2=200 the first axis term carries ~16x the weight
    const double t1 = c1 / (50.0 * 50.0), t2 = c2 / (200.0 * 200.0);
    CHECK(t1 > 10.0 * t2);
}

TEST_CASE("singular expansion design throws") {
    GridStore store;
    const auto n01 = Distribution::normal(0, 1);
    const std::vector<Distribution> dists{n01, n01};
    const std::vector<std::vector<int>> levels{{50}, {50}};
    auto f2 = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    CHECK_THROWS_AS((void)expansion_check(store, dists, levels, f2, 2.0), std::runtime_error);
}
