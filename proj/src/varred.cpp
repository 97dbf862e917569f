#include "quantcub/varred.hpp"

#include "quantcub/cubature.hpp"
#include "quantcub/numerics.hpp"
#include "quantcub/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace qcub {

double basket_payoff(std::span<const double> terminals, std::span<const double> alphas,
                     double strike) {
    if (terminals.size() != alphas.size())
        throw std::invalid_argument("basket_payoff: dimension mismatch");
    double b = -strike;
    for (std::size_t k = 0; k < terminals.size(); ++k) b += alphas[k] * terminals[k];
    return b > 0.0 ? b : 0.0;
}

Distribution ControlVariates::coordinate_law(int k) const {
    if (spec_.basis == CvBasis::gaussian) return Distribution::normal(0.0, 1.0);
    const double sig = model_.sigmas[k];
    return Distribution::lognormal(std::log(model_.s0[k]) + (model_.r - 0.5 * sig * sig) * model_.t,
                                   sig * std::sqrt(model_.t));
}

double ControlVariates::slice(int k, double value) const {
    const int d = model_.dim();
    const double disc = std::exp(-model_.r * model_.t);
    if (spec_.basis == CvBasis::gaussian) {
        // payoff of the full model with every driver but k anchored at 0
        std::vector<double> z(d, 0.0), s(d);
        z[k] = value;
        bs_terminals(model_, chol_, z, s);
        return disc * basket_payoff(s, alphas_, strike_);
    }
    double b = alphas_[k] * value - strike_;
    for (int j = 0; j < d; ++j)
        if (j != k) b += alphas_[j] * anchors_[j];
    return b > 0.0 ? disc * b : 0.0;
}

ControlVariates::ControlVariates(GridStore& store, const BSModel& model,
                                 std::vector<double> alphas, double strike,
                                 const CVSpec& spec)
    : store_(store), model_(model), alphas_(std::move(alphas)), strike_(strike), spec_(spec) {
    const int d = model_.dim();
    if (static_cast<int>(alphas_.size()) != d)
        throw std::invalid_argument("ControlVariates: weight vector dimension mismatch");
    chol_ = correlation_cholesky(model_);

    anchors_.resize(d);
    for (int k = 0; k < d; ++k)
        anchors_[k] = spec_.basis == CvBasis::gaussian
                          ? 0.0
                          : model_.s0[k] * std::exp(model_.r * model_.t);

    quantized_means_.resize(d);
    for (int k = 0; k < d; ++k) {
        const QuantizerGrid& grid = store_.get(coordinate_law(k), spec_.grid_level);
        grid_residual_ = std::max(grid_residual_, stationarity_residual(grid));
        quantized_means_[k] =
            quantized_expectation(grid, [this, k](double v) { return slice(k, v); });
    }
    if (grid_residual_ > 1e-7)
        warning_ = "control-variate grid stationarity residual above 1e-7";
}

void ControlVariates::eval(std::span<const double> z, std::span<const double> s,
                           std::span<double> out) const {
    const int d = model_.dim();
    for (int k = 0; k < d; ++k)
        out[k] = slice(k, spec_.basis == CvBasis::gaussian ? z[k] : s[k]);
}

double ControlVariates::slice_true_mean(int k) const {
    const Distribution law = coordinate_law(k);
    const double lo = law.inverse_cdf(1e-12);
    const double hi = law.inverse_cdf(1.0 - 1e-12);
    return integrate_adaptive(
        [&](double x) { return slice(k, x) * law.pdf(x); }, lo, hi, 1e-11);
}

std::vector<double> solve_lambda(const std::vector<std::vector<double>>& controls,
                                 std::span<const double> payoff,
                                 bool independent_coordinates) {
    const int d = static_cast<int>(controls.size());
    if (d < 1) throw std::invalid_argument("solve_lambda: no controls");
    const std::size_t m = payoff.size();
    if (m < static_cast<std::size_t>(d) + 1)
        throw std::invalid_argument("solve_lambda: need at least d+1 samples");
    for (const auto& c : controls)
        if (c.size() != m) throw std::invalid_argument("solve_lambda: sample count mismatch");

    std::vector<double> cmean(d, 0.0);
    double fmean = 0.0;
    for (double v : payoff) fmean += v;
    fmean /= static_cast<double>(m);
    for (int k = 0; k < d; ++k) {
        for (double v : controls[k]) cmean[k] += v;
        cmean[k] /= static_cast<double>(m);
    }

    Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < m; ++i) {
        for (int k = 0; k < d; ++k) {
            const double ck = controls[k][i] - cmean[k];
            b(k) += ck * (payoff[i] - fmean);
            for (int l = k; l < d; ++l)
                dmat(k, l) += ck * (controls[l][i] - cmean[l]);
        }
    }
    const double denom = static_cast<double>(m - 1);
    dmat /= denom;
    b /= denom;
    for (int k = 0; k < d; ++k)
        for (int l = k + 1; l < d; ++l) dmat(l, k) = dmat(k, l);

    std::vector<double> lambda(d, 0.0);
    if (independent_coordinates) {
        for (int k = 0; k < d; ++k)
            lambda[k] = dmat(k, k) > 0.0 ? b(k) / dmat(k, k) : 0.0;
        return lambda;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(dmat);
    Eigen::VectorXd sol;
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
        sol = ldlt.solve(b);
        ok = sol.allFinite();
    }
    if (!ok) {
        const double ridge = 1e-10 * dmat.trace();
        Eigen::MatrixXd reg = dmat + ridge * Eigen::MatrixXd::Identity(d, d);
        Eigen::LDLT<Eigen::MatrixXd> retry(reg);
        if (retry.info() != Eigen::Success)
            throw std::runtime_error("solve_lambda: covariance system singular even with ridge");
        sol = retry.solve(b);
        if (!sol.allFinite())
            throw std::runtime_error("solve_lambda: covariance system singular even with ridge");
    }
    for (int k = 0; k < d; ++k) lambda[k] = sol(k);
    return lambda;
}

namespace {

EstimatorReport summarize(const std::string& name, const std::vector<double>& reps,
                          int m, double reference) {
    EstimatorReport rep;
    rep.estimator = name;
    rep.n_replications = static_cast<int>(reps.size());
    rep.samples_per_replication = m;
    const double n = static_cast<double>(reps.size());
    KahanSum s;
    for (double v : reps) s.add(v);
    rep.mean = s.value() / n;
    if (reps.size() > 1) {
        double ss = 0.0;
        for (double v : reps) ss += (v - rep.mean) * (v - rep.mean);
        rep.half_width_95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    KahanSum se;
    for (double v : reps) se.add((v - reference) * (v - reference));
    rep.empirical_mse = se.value() / n;
    return rep;
}

} // namespace

ExperimentResult run_experiment(GridStore& store, const BSModel& model,
                                std::vector<double> alphas, double strike,
                                const CVSpec& spec, int m, int n, std::uint64_t seed,
                                double reference) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("run_experiment: M and n must be >= 1");
    const int d = model.dim();
    const auto chol = correlation_cholesky(model);
    ControlVariates cv(store, model, alphas, strike, spec);
    const double disc = std::exp(-model.r * model.t);

    std::vector<double> crude_reps, controlled_reps, lambda;
    crude_reps.reserve(n);
    controlled_reps.reserve(n);

    std::vector<double> z(d), s(d), c(d);
    std::vector<double> payoff(m);
    std::vector<std::vector<double>> controls(d, std::vector<double>(m));

    const int pilot_m = std::max(d + 1, m / 10);

    for (int rep = 0; rep < n; ++rep) {
        Rng rng(seed, static_cast<std::uint64_t>(rep));

        std::optional<std::vector<double>> pilot_lambda;
        if (spec.pilot_lambda && !spec.lambda_override) {
            // separate pilot stream segment ahead of the estimate samples
            std::vector<double> pf(pilot_m);
            std::vector<std::vector<double>> pc(d, std::vector<double>(pilot_m));
            for (int i = 0; i < pilot_m; ++i) {
                for (int j = 0; j < d; ++j) z[j] = rng.gauss();
                bs_terminals(model, chol, z, s);
                pf[i] = disc * basket_payoff(s, alphas, strike);
                cv.eval(z, s, c);
                for (int k = 0; k < d; ++k) pc[k][i] = c[k];
            }
            pilot_lambda = solve_lambda(pc, pf, cv.independent_coordinates());
        }

        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < d; ++j) z[j] = rng.gauss();
            bs_terminals(model, chol, z, s);
            payoff[i] = disc * basket_payoff(s, alphas, strike);
            cv.eval(z, s, c);
            for (int k = 0; k < d; ++k) controls[k][i] = c[k];
        }

        if (spec.lambda_override) lambda = *spec.lambda_override;
        else if (pilot_lambda) lambda = *pilot_lambda;
        else lambda = solve_lambda(controls, payoff, cv.independent_coordinates());
        if (static_cast<int>(lambda.size()) != d)
            throw std::invalid_argument("run_experiment: lambda dimension mismatch");

        KahanSum fsum;
        for (double v : payoff) fsum.add(v);
        const double crude_mean = fsum.value() / m;

        double adjust = 0.0;
        for (int k = 0; k < d; ++k) {
            KahanSum cs;
            for (double v : controls[k]) cs.add(v);
            adjust += lambda[k] * (cs.value() / m - cv.quantized_means()[k]);
        }

        crude_reps.push_back(crude_mean);
        controlled_reps.push_back(crude_mean - adjust);
    }

    ExperimentResult out;
    out.crude = summarize("crude", crude_reps, m, reference);
    out.controlled = summarize(spec.basis == CvBasis::gaussian ? "cv-gaussian" : "cv-lognormal",
                               controlled_reps, m, reference);
    out.crude.variance_ratio_vs_crude = 1.0;
    out.controlled.variance_ratio_vs_crude =
        out.controlled.empirical_mse > 0.0
            ? out.crude.empirical_mse / out.controlled.empirical_mse
            : 0.0;
    out.lambda = lambda;
    out.quantized_means = cv.quantized_means();
    out.warning = cv.warning();
    return out;
}

} // namespace qcub
