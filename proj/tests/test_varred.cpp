#include "quantcub/varred.hpp"

#include "quantcub/experiments.hpp"
#include "quantcub/rng.hpp"

#include <doctest.h>

#include <stdexcept>
#include <algorithm>
#include <vector>

#include <cmath>

using namespace qcub;

TEST_CASE("basket payoff arithmetic") {
    const std::vector<double> alphas{1.0 / 3, 2.0 / 3};
    const std::vector<double> at_strike{90.0, 90.0};
    CHECK(basket_payoff(at_strike, alphas, 90.0) == 0.0);
    const std::vector<double> terms{120.0, 80.0};
    CHECK(basket_payoff(terms, alphas, 90.0) == doctest::Approx(10.0 / 3).epsilon(1e-14));
    const std::vector<double> bad{1.0};
    CHECK_THROWS_AS((void)basket_payoff(bad, alphas, 90.0), std::invalid_argument);
}

TEST_CASE("solve_lambda with a perfect control") {
    Rng rng(55);
    const int m = 4000;
    std::vector<std::vector<double>> controls(1, std::vector<double>(m));
    std::vector<double> payoff(m);
    for (int i = 0; i < m; ++i) {
        payoff[i] = rng.gauss() + 2.0;
        controls[0][i] = payoff[i];
    }
    const auto lambda = solve_lambda(controls, payoff, true);
    CHECK(lambda[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_lambda recovers synthetic coefficients") {
    Rng rng(77);
    const int m = 200000, d = 2;
    std::vector<std::vector<double>> controls(d, std::vector<double>(m));
    std::vector<double> payoff(m);
    for (int i = 0; i < m; ++i) {
        const double c1 = rng.gauss();
        const double c2 = rng.gauss(); // independent coordinates
        controls[0][i] = c1;
        controls[1][i] = c2;
        payoff[i] = 2.0 * c1 + 3.0 * c2 + 0.1 * rng.gauss();
    }
    const auto diag = solve_lambda(controls, payoff, true);
    const auto full = solve_lambda(controls, payoff, false);
    CHECK(diag[0] == doctest::Approx(2.0).epsilon(3e-3));
    CHECK(diag[1] == doctest::Approx(3.0).epsilon(3e-3));

    // direct regression oracle: normal equations in long double
    long double s11 = 0, s22 = 0, s12 = 0, b1 = 0, b2 = 0, m1 = 0, m2 = 0, mf = 0;
    for (int i = 0; i < m; ++i) {
        m1 += controls[0][i];
        m2 += controls[1][i];
        mf += payoff[i];
    }
    m1 /= m;
    m2 /= m;
    mf /= m;
    for (int i = 0; i < m; ++i) {
        const long double a = controls[0][i] - m1, b = controls[1][i] - m2,
                          f = payoff[i] - mf;
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
        b1 += a * f;
        b2 += b * f;
    }
    const long double det = s11 * s22 - s12 * s12;
    const double l1 = static_cast<double>((b1 * s22 - b2 * s12) / det);
    const double l2 = static_cast<double>((b2 * s11 - b1 * s12) / det);
    CHECK(full[0] == doctest::Approx(l1).epsilon(1e-10));
    CHECK(full[1] == doctest::Approx(l2).epsilon(1e-10));

    std::vector<std::vector<double>> tiny(2, std::vector<double>(2));
    std::vector<double> tiny_payoff(2);
    CHECK_THROWS_AS((void)solve_lambda(tiny, tiny_payoff, false), std::invalid_argument);
}

TEST_CASE("zero covariance gives zero lambda") {
    Rng rng(3);
    const int m = 2000;
    std::vector<std::vector<double>> controls(1, std::vector<double>(m));
    std::vector<double> payoff(m, 1.0); // constant payoff
    for (int i = 0; i < m; ++i) controls[0][i] = rng.gauss();
    const auto lambda = solve_lambda(controls, payoff, true);
    CHECK(std::fabs(lambda[0]) <= 1e-12);
}

TEST_CASE("lambda zero reproduces the crude estimator exactly") {
    GridStore store;
    BasketExperiment e;
    CVSpec spec;
    spec.grid_level = 40;
    spec.lambda_override = std::vector<double>{0.0, 0.0};
    const ExperimentResult res = run_experiment(store, e.model(), e.alphas(), e.strike,
                                                 spec, 500, 8, 42,
                                                 BasketExperiment::kReferenceD2);
    CHECK(res.controlled.mean == res.crude.mean);
    CHECK(res.controlled.empirical_mse == res.crude.empirical_mse);
}

TEST_CASE("payoff independent of a coordinate zeroes its control") {
    GridStore store;
    BasketExperiment e;
    BSModel m = e.model();
    // all weight on the first asset: slices along the second are flat for
    // the lognormal basis
    const std::vector<double> alphas{1.0, 0.0};
    CVSpec spec;
    spec.basis = CvBasis::lognormal;
    spec.grid_level = 50;
    const ExperimentResult res =
        run_experiment(store, m, alphas, 90.0, spec, 2000, 4, 1, 15.0);
    CHECK(std::fabs(res.lambda[1]) <= 1e-9);
}

TEST_CASE("d=1 control variate collapses the variance") {
    GridStore store;
    BasketExperiment e;
    e.d = 1;
    e.strike = 100.0;
    CVSpec spec;
    spec.basis = CvBasis::lognormal;
    spec.grid_level = 200;
    const BSModel m = e.model();
    // reference: 1D call, closed form
    const double ref = bs_call_price(e.s0, e.strike, e.r, 1.0 / 2, e.t);
    const ExperimentResult res =
        run_experiment(store, m, {1.0}, e.strike, spec, 10000, 16, 7, ref);
    CHECK(res.controlled.empirical_mse <= res.crude.empirical_mse * 1e-4);
    CHECK(res.controlled.variance_ratio_vs_crude >= 1e3);
    CHECK(res.lambda[0] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("control variate slice means and bias decay") {
    GridStore store;
    BasketExperiment e;
    const BSModel m = e.model();
    std::vector<double> biases;
    for (int n : {20, 50, 200}) {
        CVSpec spec;
        spec.basis = CvBasis::lognormal;
        spec.grid_level = n;
        ControlVariates cv(store, m, e.alphas(), e.strike, spec);
        double worst = 0.0;
        for (int k = 0; k < 2; ++k)
            worst = std::max(worst,
                             std::fabs(cv.quantized_means()[k] - cv.slice_true_mean(k)));
        biases.push_back(worst);
    }
    // ~N^-2 decay: jumping 20 -> 50 -> 200 shrinks the bias accordingly
    CHECK(biases[1] <= biases[0] * std::pow(20.0 / 50.0, 2.0) * 3.0);
    CHECK(biases[2] <= biases[1] * std::pow(50.0 / 200.0, 2.0) * 3.0);
    // at N=200 the squared bias is negligible against variance/M at M=1e4
    CHECK(biases[2] * biases[2] <= 1e-3 * 0.145);
}

TEST_CASE("bias-variance accounting") {
    GridStore store;
    BasketExperiment e;
    const BSModel m = e.model();
    CVSpec spec;
    spec.basis = CvBasis::lognormal;
    spec.grid_level = 200;
    const int samples = 10000, reps = 64;
    const ExperimentResult res = run_experiment(store, m, e.alphas(), e.strike, spec,
                                                 samples, reps, 2024,
                                                 BasketExperiment::kReferenceD2);

    // measure Var(f - lambda . c) directly on a fresh stream
    ControlVariates cv(store, m, e.alphas(), e.strike, spec);
    const auto chol = correlation_cholesky(m);
    Rng rng(777);
    const int big = 200000;
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> z(2), s(2), c(2);
    const double disc = std::exp(-m.r * m.t);
    for (int i = 0; i < big; ++i) {
        z[0] = rng.gauss();
        z[1] = rng.gauss();
        bs_terminals(m, chol, z, s);
        cv.eval(z, s, c);
        const double v = disc * basket_payoff(s, e.alphas(), e.strike) -
                         res.lambda[0] * c[0] - res.lambda[1] * c[1];
        sum += v;
        sum2 += v * v;
    }
    const double var = sum2 / big - (sum / big) * (sum / big);
    double bias = 0.0;
    for (int k = 0; k < 2; ++k)
        bias += res.lambda[k] * (cv.quantized_means()[k] - cv.slice_true_mean(k));
    const double predicted = bias * bias + var / samples;
    // chi-square noise of the empirical MSE at n=64 replications is ~18%
    CHECK(res.controlled.empirical_mse / predicted > 0.5);
    CHECK(res.controlled.empirical_mse / predicted < 2.0);
}

TEST_CASE("lognormal basis beats the gaussian basis on the basket") {
    GridStore store;
    for (int d : {2, 3}) {
        BasketExperiment e;
        e.d = d;
        const BSModel m = e.model();
        CVSpec g, l;
        g.basis = CvBasis::gaussian;
        l.basis = CvBasis::lognormal;
        g.grid_level = l.grid_level = 100;
        const double ref = d == 2 ? BasketExperiment::kReferenceD2 : 14.1618;
        const ExperimentResult rg =
            run_experiment(store, m, e.alphas(), e.strike, g, 4000, 32, 5, ref);
        const ExperimentResult rl =
            run_experiment(store, m, e.alphas(), e.strike, l, 4000, 32, 5, ref);
        CHECK(rl.controlled.empirical_mse <= rg.controlled.empirical_mse);
    }
}

TEST_CASE("pilot lambda variant stays unbiased and close") {
    GridStore store;
    BasketExperiment e;
    const BSModel m = e.model();
    CVSpec spec;
    spec.basis = CvBasis::lognormal;
    spec.grid_level = 100;
    spec.pilot_lambda = true;
    const ExperimentResult res = run_experiment(store, m, e.alphas(), e.strike, spec,
                                                 4000, 32, 9, BasketExperiment::kReferenceD2);
    CHECK(std::fabs(res.controlled.mean - BasketExperiment::kReferenceD2) <= 0.1);
    CHECK(res.controlled.empirical_mse < res.crude.empirical_mse);
}

TEST_CASE("loose grids trigger the stationarity warning") {
    GridStore store;
    store.config().tol_factor = 10.0; // accept the quantile initialization as-is
    store.config().polish_steps = 0;
    BasketExperiment e;
    CVSpec spec;
    spec.basis = CvBasis::lognormal;
    spec.grid_level = 10;
    ControlVariates cv(store, e.model(), e.alphas(), e.strike, spec);
    CHECK(cv.grid_residual() > 1e-7);
    CHECK(!cv.warning().empty());
}
