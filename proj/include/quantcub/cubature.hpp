#ifndef QUANTCUB_CUBATURE_HPP
#define QUANTCUB_CUBATURE_HPP

#include "quantcub/grid_store.hpp"
#include "quantcub/quantizer.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qcub {

using Fn1D = std::function<double(double)>;

/// E[f(Xhat)] = sum_i p_i f(x_i). Throws std::runtime_error naming the node
/// index if f returns a non-finite value there.
double quantized_expectation(const QuantizerGrid& grid, const Fn1D& f);

/// Least-squares slope of log(error) against log(level). Throws
/// std::invalid_argument unless at least two errors are positive.
double fit_rate(std::span<const double> levels, std::span<const double> errors);

/// One weak-error convergence study: per-level estimates, absolute errors,
/// N^k-scaled errors and the fitted log-log slope.
struct RateStudy {
    std::vector<int> levels;
    std::vector<double> estimates;
    std::vector<double> errors; // |reference - estimate|
    std::vector<double> scaled; // N^k * error
    double k = 2.0;
    double reference = 0.0;
    std::string provenance; // where the reference value comes from
    std::optional<double> fitted_slope;
};

/// Builds (or loads) a grid per level and fills a RateStudy. The slope is
/// fitted only over levels whose error clears 10 eps |reference|, and only
/// when at least four of them do.
RateStudy rate_study(GridStore& store, const Distribution& dist, const Fn1D& f,
                     double reference, const std::string& provenance,
                     const std::vector<int>& levels, double k);

/// The two-level extrapolation weights: (nt^2 e_nt - n^2 e_n)/(nt^2 - n^2).
double rr_combine(double n, double est_n, double nt, double est_nt);

/// Richardson-Romberg extrapolated cubature with nt = ceil(ratio * n).
double richardson_romberg(GridStore& store, const Distribution& dist, const Fn1D& f,
                          int n, double ratio = 1.2);

/// CSV rows "N,estimate,error,scaled_error"; JSON {slope, reference, k,
/// provenance}.
void write_rate_csv(const RateStudy& study, const std::filesystem::path& path);
void write_rate_json(const RateStudy& study, const std::filesystem::path& path);
std::string rate_csv_string(const RateStudy& study);
std::string rate_json_string(const RateStudy& study);

} // namespace qcub

#endif
