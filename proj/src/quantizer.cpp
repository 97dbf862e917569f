#include "quantcub/quantizer.hpp"

#include "quantcub/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qcub {

namespace {

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<double> midpoints(const Distribution& dist, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> m(n + 1);
    m[0] = dist.support_lo();
    for (std::size_t i = 1; i < n; ++i) m[i] = 0.5 * (x[i - 1] + x[i]);
    m[n] = dist.support_hi();
    return m;
}

bool points_valid(const Distribution& dist, const std::vector<double>& x) {
    if (x.empty()) return false;
    if (!(x.front() > dist.support_lo() && x.back() < dist.support_hi())) return false;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) return false;
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

double QuantizerGrid::midpoint(int k) const {
    const int n = level();
    if (k <= 0) return dist.support_lo();
    if (k >= n) return dist.support_hi();
    return 0.5 * (points[k - 1] + points[k]);
}

void validate_points(const Distribution& dist, const std::vector<double>& points) {
    if (points.empty())
        throw std::invalid_argument("quantizer: empty point set");
    if (!points_valid(dist, points))
        throw std::invalid_argument(
            "quantizer: points must be strictly increasing inside the open support");
}

std::vector<double> cell_weights(const Distribution& dist, const std::vector<double>& points) {
    validate_points(dist, points);
    const auto mid = midpoints(dist, points);
    std::vector<double> w(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        w[i] = dist.cell_moments(mid[i], mid[i + 1]).p;
    return w;
}

double distortion_value(const Distribution& dist, const std::vector<double>& points) {
    validate_points(dist, points);
    const auto mid = midpoints(dist, points);
    KahanSum s;
    for (std::size_t i = 0; i < points.size(); ++i)
        s.add(dist.cell_distortion(mid[i], mid[i + 1], points[i]));
    return s.value();
}

DistortionInfo distortion_info(const Distribution& dist, const std::vector<double>& points) {
    validate_points(dist, points);
    const std::size_t n = points.size();
    const auto mid = midpoints(dist, points);

    DistortionInfo out;
    out.gradient.resize(n);
    out.hess_diag.resize(n);
    out.hess_off.assign(n > 1 ? n - 1 : 0, 0.0);

    KahanSum value;
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CellMoments cm = dist.cell_moments(mid[i], mid[i + 1]);
        probs[i] = cm.p;
        out.gradient[i] = 2.0 * (points[i] * cm.p - cm.m1);
        value.add(dist.cell_distortion(mid[i], mid[i + 1], points[i]));
    }
    out.value = value.value();

    // Only interior midpoints move with the points; fixed support endpoints
    // contribute nothing to the Hessian.
    for (std::size_t i = 0; i < n; ++i) {
        double h = 2.0 * probs[i];
        if (i + 1 < n) {
            const double w = dist.pdf(mid[i + 1]) * 0.5 * (points[i + 1] - points[i]);
            h -= w;
            out.hess_off[i] = -w;
        }
        if (i > 0) h -= dist.pdf(mid[i]) * 0.5 * (points[i] - points[i - 1]);
        out.hess_diag[i] = h;
    }
    return out;
}

std::vector<double> lloyd_step(const Distribution& dist, const std::vector<double>& points) {
    validate_points(dist, points);
    const auto mid = midpoints(dist, points);
    std::vector<double> next(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const CellMoments cm = dist.cell_moments(mid[i], mid[i + 1]);
        if (!(cm.p > 0.0))
            throw std::runtime_error("lloyd_step: degenerate cell with zero probability");
        next[i] = cm.m1 / cm.p;
    }
    return next;
}

QuantizerGrid make_grid(const Distribution& dist, std::vector<double> points) {
    validate_points(dist, points);
    QuantizerGrid g{dist, std::move(points), {}, 0.0};
    g.weights = cell_weights(dist, g.points);
    g.distortion = distortion_value(dist, g.points);
    return g;
}

std::pair<QuantizerGrid, OptimizeReport> optimize(const Distribution& dist, int n,
                                                  const OptimizeConfig& cfg) {
    if (n < 1) throw std::invalid_argument("optimize: level must be >= 1");
    OptimizeReport report;

    if (n == 1) {
        QuantizerGrid g{dist, {dist.mean()}, {1.0}, dist.variance()};
        report.converged = true;
        return {g, report};
    }

    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = dist.inverse_cdf((2.0 * i + 1.0) / (2.0 * n));

    const double tol = cfg.tol_factor * n;
    double value = distortion_value(dist, x);
    DistortionInfo info = distortion_info(dist, x);
    double grad_norm = sup_norm(info.gradient);

    double trace = 0.0;
    for (double h : info.hess_diag) trace += h;
    double mu = cfg.mu0_factor * trace / n;

    std::vector<double> step(n), candidate(n);
    int it = 0;
    while (it < cfg.max_iters && grad_norm > tol) {
        ++it;
        report.damping_history.push_back(mu);

        std::vector<double> damped = info.hess_diag;
        for (double& d : damped) d += mu;
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -info.gradient[i];

        bool accepted = false;
        if (solve_sym_tridiagonal(damped, info.hess_off, rhs, step)) {
            for (int i = 0; i < n; ++i) candidate[i] = x[i] + step[i];
            if (points_valid(dist, candidate)) {
                const double cand_value = distortion_value(dist, candidate);
                if (cand_value <= value) {
                    x = candidate;
                    value = cand_value;
                    accepted = true;
                }
            }
        }

        if (accepted) {
            mu = std::max(mu / cfg.mu_drop, 1e-300);
        } else {
            mu *= cfg.mu_raise;
            if (mu > cfg.mu_max) {
                for (int k = 0; k < cfg.lloyd_fallback_steps; ++k) x = lloyd_step(dist, x);
                value = distortion_value(dist, x);
                info = distortion_info(dist, x);
                double tr = 0.0;
                for (double h : info.hess_diag) tr += h;
                mu = cfg.mu0_factor * tr / n;
                grad_norm = sup_norm(info.gradient);
                continue;
            }
        }

        info = distortion_info(dist, x);
        grad_norm = sup_norm(info.gradient);
    }

    report.converged = grad_norm <= tol;

    // Undamped Newton polish, judged by the worst per-cell displacement
    // |x_i - cell mean| = |g_i| / (2 p_i). The gradient sup-norm alone lets
    // near-zero-weight tail cells sit far from their conditional means;
    // the stationarity identities need those extra digits.
    auto residual = [&](const std::vector<double>& pts,
                        const DistortionInfo& di) {
        const auto probs = cell_weights(dist, pts);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst,
                             std::fabs(di.gradient[i]) / (2.0 * std::max(probs[i], 1e-300)));
        return worst;
    };
    double resid = report.converged ? residual(x, info) : 0.0;
    for (int k = 0; report.converged && k < cfg.polish_steps; ++k) {
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -info.gradient[i];
        if (!solve_sym_tridiagonal(info.hess_diag, info.hess_off, rhs, step)) break;
        for (int i = 0; i < n; ++i) candidate[i] = x[i] + step[i];
        if (!points_valid(dist, candidate)) break;
        const DistortionInfo cand_info = distortion_info(dist, candidate);
        const double cand_resid = residual(candidate, cand_info);
        if (cand_resid >= resid || sup_norm(cand_info.gradient) > tol) break;
        x = candidate;
        info = cand_info;
        resid = cand_resid;
        grad_norm = sup_norm(info.gradient);
    }

    report.iterations = it;
    report.final_gradient_norm = grad_norm;
    return {make_grid(dist, std::move(x)), report};
}

QuantizerGrid brute_force_quantizer(const Distribution& dist, int n, int resolution) {
    if (n < 1 || n > 5)
        throw std::invalid_argument("brute_force_quantizer: supports 1 <= N <= 5");
    if (resolution < 2 * n)
        throw std::invalid_argument("brute_force_quantizer: resolution too small");
    if (n == 1) {
        return QuantizerGrid{dist, {dist.mean()}, {1.0}, dist.variance()};
    }

    const int r = resolution;
    // Cumulative moments up to each candidate boundary (quantiles of the law).
    std::vector<double> cp(r + 1), cm1(r + 1), cm2(r + 1);
    cp[0] = cm1[0] = cm2[0] = 0.0;
    cp[r] = 1.0;
    cm1[r] = dist.mean();
    cm2[r] = dist.second_moment();
    const double lo = dist.support_lo();
    for (int j = 1; j < r; ++j) {
        const double c = dist.inverse_cdf(static_cast<double>(j) / r);
        const CellMoments cm = dist.cell_moments(lo, c);
        cp[j] = cm.p;
        cm1[j] = cm.m1;
        cm2[j] = cm.m2;
    }

    // cost(i,j): distortion of the cell between boundaries i and j when the
    // point sits at the cell's conditional mean.
    auto cost = [&](int i, int j) {
        const double p = cp[j] - cp[i];
        if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
        const double m1 = cm1[j] - cm1[i];
        const double m2 = cm2[j] - cm2[i];
        return m2 - m1 * m1 / p;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(r + 1, inf), cur(r + 1, inf);
    std::vector<std::vector<int>> arg(n + 1, std::vector<int>(r + 1, -1));
    for (int j = 1; j <= r; ++j) prev[j] = cost(0, j);
    for (int k = 2; k <= n; ++k) {
        std::fill(cur.begin(), cur.end(), inf);
        for (int j = k; j <= r; ++j) {
            double best = inf;
            int best_i = -1;
            for (int i = k - 1; i < j; ++i) {
                const double v = prev[i] + cost(i, j);
                if (v < best) {
                    best = v;
                    best_i = i;
                }
            }
            cur[j] = best;
            arg[k][j] = best_i;
        }
        std::swap(prev, cur);
    }

    std::vector<int> bounds(n + 1);
    bounds[n] = r;
    for (int k = n; k >= 2; --k) bounds[k - 1] = arg[k][bounds[k]];
    bounds[0] = 0;

    std::vector<double> points(n);
    for (int k = 0; k < n; ++k) {
        const double p = cp[bounds[k + 1]] - cp[bounds[k]];
        points[k] = (cm1[bounds[k + 1]] - cm1[bounds[k]]) / p;
    }
    return make_grid(dist, std::move(points));
}

double stationarity_residual(const QuantizerGrid& grid) {
    double worst = 0.0;
    for (int i = 0; i < grid.level(); ++i) {
        const CellMoments cm = grid.dist.cell_moments(grid.midpoint(i), grid.midpoint(i + 1));
        if (!(cm.p > 0.0)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::fabs(grid.points[i] - cm.m1 / cm.p));
    }
    return worst;
}

double cell_identity_residual(const QuantizerGrid& grid) {
    double worst = 0.0;
    for (int i = 0; i < grid.level(); ++i) {
        const CellMoments cm = grid.dist.cell_moments(grid.midpoint(i), grid.midpoint(i + 1));
        worst = std::max(worst, std::fabs(grid.points[i] * cm.p - cm.m1));
    }
    return worst;
}

std::vector<LocalBehaviorRow> local_behavior_table(const QuantizerGrid& grid,
                                                   double window_lo, double window_hi) {
    std::vector<LocalBehaviorRow> rows;
    const double n = grid.level();
    for (int i = 0; i < grid.level(); ++i) {
        const double x = grid.points[i];
        if (x < window_lo || x > window_hi) continue;
        const double local =
            grid.dist.cell_distortion(grid.midpoint(i), grid.midpoint(i + 1), x);
        rows.push_back({x, n * grid.weights[i], n * n * n * local});
    }
    return rows;
}

void write_grid_csv(const QuantizerGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open grid file for writing: " + path.string());
    char buf[160];
    std::snprintf(buf, sizeof buf, "# dist=%s N=%d distortion=%.17g\n",
                  grid.dist.to_string().c_str(), grid.level(), grid.distortion);
    out << buf;
    for (int i = 0; i < grid.level(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.points[i], grid.weights[i]);
        out << buf;
    }
    if (!out) throw std::runtime_error("failed writing grid file: " + path.string());
}

QuantizerGrid read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
    std::string header;
    if (!std::getline(in, header) || header.rfind("# dist=", 0) != 0)
        throw std::runtime_error("grid file missing '# dist=...' header: " + path.string());

    std::string spec, distortion_str;
    int n = -1;
    {
        std::istringstream hs(header.substr(2));
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("dist=", 0) == 0) spec = tok.substr(5);
            else if (tok.rfind("N=", 0) == 0) n = std::stoi(tok.substr(2));
            else if (tok.rfind("distortion=", 0) == 0) distortion_str = tok.substr(11);
        }
    }
    if (spec.empty() || n < 1 || distortion_str.empty())
        throw std::runtime_error("malformed grid header: " + header);

    const Distribution dist = Distribution::parse(spec);
    std::vector<double> points, weights;
    points.reserve(n);
    weights.reserve(n);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed grid row: " + line);
        points.push_back(std::stod(line.substr(0, comma)));
        weights.push_back(std::stod(line.substr(comma + 1)));
    }
    if (static_cast<int>(points.size()) != n)
        throw std::runtime_error("grid file row count does not match header N");

    QuantizerGrid grid = make_grid(dist, std::move(points));
    const double stored_distortion = std::stod(distortion_str);

    // The file's weights and distortion must agree with what the points
    // imply; 17 significant digits round-trip exactly, so the margin is
    // only for reading files produced elsewhere.
    for (int i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0) || std::fabs(weights[i] - grid.weights[i]) > 1e-12)
            throw std::runtime_error("grid file weights violate cell-probability invariants");
    }
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::runtime_error("grid file weights do not sum to 1");
    if (std::fabs(stored_distortion - grid.distortion) >
        1e-12 * std::max(1.0, grid.distortion))
        throw std::runtime_error("grid file distortion does not match its points");
    grid.weights = std::move(weights);
    grid.distortion = stored_distortion;
    return grid;
}

} // namespace qcub
