#ifndef QUANTCUB_QUANTIZER_HPP
#define QUANTCUB_QUANTIZER_HPP

#include "quantcub/distribution.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qcub {

/// A quadratic quantizer grid for one distribution: sorted points, the
/// probability of each Voronoi cell (cells follow the half-open convention
/// (x_{i-1/2}, x_{i+1/2}]), and the squared L2 quantization error.
struct QuantizerGrid {
    Distribution dist;
    std::vector<double> points;
    std::vector<double> weights;
    double distortion = 0.0;

    int level() const { return static_cast<int>(points.size()); }

    /// Cell boundary k for k = 0..N: support endpoints at the extremes,
    /// midpoints in between.
    double midpoint(int k) const;
};

struct DistortionInfo {
    double value = 0.0;
    std::vector<double> gradient;
    std::vector<double> hess_diag; // symmetric tridiagonal Hessian
    std::vector<double> hess_off;
};

struct OptimizeConfig {
    double tol_factor = 1e-11; // gradient sup-norm tolerance = tol_factor * N
    int max_iters = 200;
    double mu0_factor = 1e-4; // initial damping = mu0_factor * tr(H)/N
    double mu_raise = 10.0;
    double mu_drop = 10.0;
    double mu_max = 1e6;      // past this, fall back to Lloyd iterations
    int lloyd_fallback_steps = 20;
    int polish_steps = 6;     // undamped Newton steps after reaching tol
};

struct OptimizeReport {
    int iterations = 0;
    double final_gradient_norm = 0.0;
    std::vector<double> damping_history;
    bool converged = false;
};

/// Throws std::invalid_argument unless points are strictly increasing and
/// inside the open support.
void validate_points(const Distribution& dist, const std::vector<double>& points);

std::vector<double> cell_weights(const Distribution& dist, const std::vector<double>& points);

double distortion_value(const Distribution& dist, const std::vector<double>& points);

/// Distortion with its exact gradient and tridiagonal Hessian, assembled
/// from the closed-form cell moments.
DistortionInfo distortion_info(const Distribution& dist, const std::vector<double>& points);

/// One fixed-point step: every point moves to the conditional mean of its
/// cell. Never increases the distortion.
std::vector<double> lloyd_step(const Distribution& dist, const std::vector<double>& points);

/// Build a grid record (weights + distortion) from validated points.
QuantizerGrid make_grid(const Distribution& dist, std::vector<double> points);

/// Newton-Raphson with Levenberg-Marquardt damping from the quantile
/// initialization, with a Lloyd fallback when damping blows up.
std::pair<QuantizerGrid, OptimizeReport> optimize(const Distribution& dist, int n,
                                                  const OptimizeConfig& cfg = {});

/// Independent oracle for small N: dynamic programming over a quantile
/// discretization of the cell boundaries (resolution intervals), each cell
/// represented by its conditional mean. The resulting distortion upper
/// bounds the optimum and converges to it as the resolution grows.
QuantizerGrid brute_force_quantizer(const Distribution& dist, int n, int resolution = 2000);

/// max_i |x_i - E[X | X in C_i]|.
double stationarity_residual(const QuantizerGrid& grid);

/// max_i |x_i p_i - int_{C_i} xi phi|, the per-cell residual of the
/// conditional stationarity identity E[f(Xhat)(X - Xhat)] = 0.
double cell_identity_residual(const QuantizerGrid& grid);

struct LocalBehaviorRow {
    double point = 0.0;
    double scaled_weight = 0.0;     // N * p_i
    double scaled_distortion = 0.0; // N^3 * local distortion
};

/// Rows for cells whose point lies in [window_lo, window_hi].
std::vector<LocalBehaviorRow> local_behavior_table(const QuantizerGrid& grid,
                                                   double window_lo, double window_hi);

/// Grid file format: "# dist=<spec> N=<n> distortion=<d>" then one
/// "x_i,p_i" row per point, 17 significant digits.
void write_grid_csv(const QuantizerGrid& grid, const std::filesystem::path& path);
QuantizerGrid read_grid_csv(const std::filesystem::path& path);

} // namespace qcub

#endif
