#ifndef QUANTCUB_PRODUCT_QUANT_HPP
#define QUANTCUB_PRODUCT_QUANT_HPP

#include "quantcub/grid_store.hpp"
#include "quantcub/quantizer.hpp"

#include <functional>
#include <span>
#include <vector>

namespace qcub {

using FnND = std::function<double(std::span<const double>)>;

/// Product quantizer of a random vector with independent components: one
/// 1D grid per axis, joint weight of a node is the product of the axis
/// weights.
struct ProductGrid {
    std::vector<QuantizerGrid> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    long long total_level() const;
};

/// Tensor cubature sum over all nodes. Lexicographic axis order with
/// fixed-chunk compensated summation, so the reduction is bit-reproducible.
/// Enforces dim <= 6 and total_level <= 1e7; beyond that the explicit
/// enumeration is hopeless and the caller should Monte Carlo over nodes.
double product_expectation(const ProductGrid& grid, const FnND& f);

struct ExpansionRow {
    std::vector<int> levels;
    double error = 0.0;  // reference - estimate (signed)
    double fitted = 0.0; // sum_k c_k / N_k^2
};

struct ExpansionCheck {
    std::vector<ExpansionRow> rows;
    std::vector<double> coefficients; // fitted c_k
};

/// Fits the per-axis second-order error coefficients by regressing the
/// signed error against (1/N_1^2, ..., 1/N_d^2) over the full factorial
/// design of the given per-axis levels. Throws on a singular design.
ExpansionCheck expansion_check(GridStore& store, const std::vector<Distribution>& dists,
                               const std::vector<std::vector<int>>& levels_per_axis,
                               const FnND& f, double reference);

} // namespace qcub

#endif
