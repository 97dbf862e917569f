#ifndef QUANTCUB_VARRED_HPP
#define QUANTCUB_VARRED_HPP

#include "quantcub/black_scholes.hpp"
#include "quantcub/grid_store.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qcub {

/// (sum_k alpha_k s_k - strike)_+, undiscounted.
double basket_payoff(std::span<const double> terminals, std::span<const double> alphas,
                     double strike);

enum class CvBasis { gaussian, lognormal };

/// How the coordinate control variates are built: which univariate slices
/// to take, the grid level used to compute their quantized means, and how
/// lambda is estimated.
struct CVSpec {
    CvBasis basis = CvBasis::lognormal;
    int grid_level = 200;
    std::optional<std::vector<double>> lambda_override;
    bool pilot_lambda = false; // estimate lambda on the first M/10 samples only
};

/// Per-coordinate control variates for the discounted basket payoff:
/// univariate slices of the payoff with the other coordinates pinned to
/// their means, plus the slices' quantized expectations.
class ControlVariates {
  public:
    ControlVariates(GridStore& store, const BSModel& model, std::vector<double> alphas,
                    double strike, const CVSpec& spec);

    int dim() const { return model_.dim(); }
    bool independent_coordinates() const { return spec_.basis == CvBasis::gaussian; }

    /// E[f_k(hat)] per coordinate, by grid cubature.
    const std::vector<double>& quantized_means() const { return quantized_means_; }

    /// Coordinate anchors E[Z_k] used when slicing the payoff.
    const std::vector<double>& anchor_means() const { return anchors_; }

    /// Worst stationarity residual among the grids used; a warning is
    /// recorded when it exceeds tolerance rather than failing the run.
    double grid_residual() const { return grid_residual_; }
    const std::string& warning() const { return warning_; }

    /// f_k evaluated on one sample; z are the iid drivers, s the terminals.
    void eval(std::span<const double> z, std::span<const double> s,
              std::span<double> out) const;

    /// Expectation of slice k under the true coordinate law by adaptive
    /// quadrature, independent of any grid; used for bias measurements.
    double slice_true_mean(int k) const;

  private:
    GridStore& store_;
    BSModel model_;
    std::vector<double> alphas_;
    double strike_;
    CVSpec spec_;
    std::vector<std::vector<double>> chol_;
    std::vector<double> quantized_means_;
    std::vector<double> anchors_;
    double grid_residual_ = 0.0;
    std::string warning_;

    double slice(int k, double value) const;
    Distribution coordinate_law(int k) const;
};

/// Variance-minimizing control coefficients from pilot samples. With
/// independent coordinates the covariance system is diagonal and lambda_k
/// reduces to Cov(f_k, f)/Var(f_k); otherwise the full system is solved,
/// with a ridge of 1e-10 tr(D)/d if the factorization fails.
std::vector<double> solve_lambda(const std::vector<std::vector<double>>& controls,
                                 std::span<const double> payoff,
                                 bool independent_coordinates);

struct EstimatorReport {
    std::string estimator;
    double mean = 0.0;
    double half_width_95 = 0.0; // 1.96 * sd(replication means)/sqrt(n)
    double empirical_mse = 0.0; // (1/n) sum (I_i - reference)^2
    int n_replications = 0;
    int samples_per_replication = 0;
    double variance_ratio_vs_crude = 1.0; // crude MSE / this MSE
};

struct ExperimentResult {
    EstimatorReport crude;
    EstimatorReport controlled;
    std::vector<double> lambda; // from the last replication
    std::vector<double> quantized_means;
    std::string warning;
};

/// n independent replications of an M-sample estimator of the discounted
/// basket payoff; the same sample stream feeds the crude and controlled
/// estimators. Fully determined by (seed, n, M).
ExperimentResult run_experiment(GridStore& store, const BSModel& model,
                                std::vector<double> alphas, double strike,
                                const CVSpec& spec, int m, int n, std::uint64_t seed,
                                double reference);

} // namespace qcub

#endif
