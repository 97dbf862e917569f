#include "quantcub/special_functions.hpp"

#include <doctest.h>

#include <initializer_list>
#include <limits>
#include <stdexcept>

#include <cmath>

using namespace qcub;

TEST_CASE("normal pdf and cdf basics") {
    CHECK(normal_pdf(0.0) == doctest::Approx(0.39894228040143267).epsilon(1e-15));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_ccdf(3.0) == doctest::Approx(1.0 - normal_cdf(3.0)).epsilon(1e-12));
    // deep tail keeps relative accuracy
    CHECK(normal_ccdf(8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-12));
}

TEST_CASE("inverse cdf round trips") {
    for (double u : {1e-12, 1e-8, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-8}) {
        const double x = normal_inv_cdf(u);
        const double back = (u <= 0.5) ? normal_cdf(x) : 1.0 - normal_ccdf(x);
        CHECK(back == doctest::Approx(u).epsilon(1e-13));
    }
    CHECK(normal_inv_cdf(0.5) == doctest::Approx(0.0));
    CHECK(normal_inv_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK_THROWS_AS((void)normal_inv_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS((void)normal_inv_cdf(1.0), std::domain_error);
}

TEST_CASE("interval probability avoids tail cancellation") {
    CHECK(normal_interval_prob(-1.0, 1.0) ==
          doctest::Approx(normal_cdf(1.0) - normal_cdf(-1.0)).epsilon(1e-15));
    // symmetric tails agree
    CHECK(normal_interval_prob(5.0, 6.0) ==
          doctest::Approx(normal_interval_prob(-6.0, -5.0)).epsilon(1e-14));
    // a cell of probability ~1e-16 still comes out positive and accurate
    const double p = normal_interval_prob(8.0, 8.5);
    CHECK(p > 0.0);
    CHECK(p == doctest::Approx(normal_ccdf(8.0) - normal_ccdf(8.5)).epsilon(1e-14));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(normal_interval_prob(-inf, inf) == 1.0);
    CHECK(normal_interval_prob(-inf, 0.0) == 0.5);
    CHECK(normal_interval_prob(0.0, inf) == 0.5);
    CHECK(normal_interval_prob(2.0, 1.0) == 0.0);
}
