#include "quantcub/cubature.hpp"

#include "quantcub/numerics.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace qcub {

double quantized_expectation(const QuantizerGrid& grid, const Fn1D& f) {
    KahanSum s;
    for (int i = 0; i < grid.level(); ++i) {
        const double v = f(grid.points[i]);
        if (!std::isfinite(v))
            throw std::runtime_error("quantized_expectation: f non-finite at node " +
                                     std::to_string(i) + " (x=" + std::to_string(grid.points[i]) +
                                     ")");
        s.add(grid.weights[i] * v);
    }
    return s.value();
}

double fit_rate(std::span<const double> levels, std::span<const double> errors) {
    if (levels.size() != errors.size())
        throw std::invalid_argument("fit_rate: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (errors[i] > 0.0) {
            lx.push_back(std::log(levels[i]));
            ly.push_back(std::log(errors[i]));
        }
    }
    if (lx.size() < 2)
        throw std::invalid_argument("fit_rate: slope undefined with fewer than two positive errors");
    return ols_slope(lx, ly);
}

RateStudy rate_study(GridStore& store, const Distribution& dist, const Fn1D& f,
                     double reference, const std::string& provenance,
                     const std::vector<int>& levels, double k) {
    if (levels.size() < 4)
        throw std::invalid_argument("rate_study: need at least four levels");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1])
            throw std::invalid_argument("rate_study: levels must be increasing");
    if (!std::isfinite(reference))
        throw std::invalid_argument("rate_study: missing reference value");

    RateStudy study;
    study.levels = levels;
    study.k = k;
    study.reference = reference;
    study.provenance = provenance;

    for (int n : levels) {
        const double est = quantized_expectation(store.get(dist, n), f);
        study.estimates.push_back(est);
        study.errors.push_back(std::fabs(reference - est));
        study.scaled.push_back(std::pow(n, k) * study.errors.back());
    }

    const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::fabs(reference);
    std::vector<double> lv, er;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (study.errors[i] > floor) {
            lv.push_back(levels[i]);
            er.push_back(study.errors[i]);
        }
    }
    if (lv.size() >= 4) study.fitted_slope = fit_rate(lv, er);
    return study;
}

double rr_combine(double n, double est_n, double nt, double est_nt) {
    if (!(nt > n)) throw std::invalid_argument("rr_combine: refined level must exceed the base");
    const double n2 = n * n, t2 = nt * nt;
    return (t2 * est_nt - n2 * est_n) / (t2 - n2);
}

double richardson_romberg(GridStore& store, const Distribution& dist, const Fn1D& f,
                          int n, double ratio) {
    const int nt = static_cast<int>(std::ceil(ratio * n));
    if (nt <= n)
        throw std::invalid_argument("richardson_romberg: ratio too small, refined level equals base");
    const double est_n = quantized_expectation(store.get(dist, n), f);
    const double est_nt = quantized_expectation(store.get(dist, nt), f);
    return rr_combine(n, est_n, nt, est_nt);
}

std::string rate_csv_string(const RateStudy& study) {
    std::string out = "N,estimate,error,scaled_error\n";
    char buf[160];
    for (std::size_t i = 0; i < study.levels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.8g,%.8g,%.8g\n", study.levels[i],
                      study.estimates[i], study.errors[i], study.scaled[i]);
        out += buf;
    }
    return out;
}

std::string rate_json_string(const RateStudy& study) {
    nlohmann::ordered_json j;
    if (study.fitted_slope) j["slope"] = *study.fitted_slope;
    else j["slope"] = nullptr;
    j["reference"] = study.reference;
    j["k"] = study.k;
    j["provenance"] = study.provenance;
    return j.dump();
}

void write_rate_csv(const RateStudy& study, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << rate_csv_string(study);
}

void write_rate_json(const RateStudy& study, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << rate_json_string(study) << '\n';
}

} // namespace qcub
