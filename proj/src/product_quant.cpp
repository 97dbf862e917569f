#include "quantcub/product_quant.hpp"

#include "quantcub/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace qcub {

long long ProductGrid::total_level() const {
    long long n = 1;
    for (const auto& g : axes) n *= g.level();
    return n;
}

double product_expectation(const ProductGrid& grid, const FnND& f) {
    const int d = grid.dim();
    if (d < 1) throw std::invalid_argument("product_expectation: no axes");
    if (d > 6)
        throw std::invalid_argument(
            "product_expectation: dim > 6; Monte Carlo over the nodes instead");
    if (grid.total_level() > 10'000'000LL)
        throw std::invalid_argument(
            "product_expectation: more than 1e7 nodes; Monte Carlo over the nodes instead");

    std::vector<int> idx(d, 0);
    std::vector<double> node(d);
    const int lead_n = grid.axes[0].level();

    // one compensated partial sum per leading-axis slice, then a
    // compensated reduction of the slices
    KahanSum total;
    for (int i0 = 0; i0 < lead_n; ++i0) {
        KahanSum slice;
        std::fill(idx.begin(), idx.end(), 0);
        idx[0] = i0;
        bool done = false;
        while (!done) {
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                node[k] = grid.axes[k].points[idx[k]];
                w *= grid.axes[k].weights[idx[k]];
            }
            const double v = f(node);
            if (!std::isfinite(v))
                throw std::runtime_error("product_expectation: f non-finite at a node");
            slice.add(w * v);
            // odometer over axes 1..d-1
            done = true;
            for (int k = d - 1; k >= 1; --k) {
                if (++idx[k] < grid.axes[k].level()) {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
        }
        total.add(slice.value());
    }
    return total.value();
}

ExpansionCheck expansion_check(GridStore& store, const std::vector<Distribution>& dists,
                               const std::vector<std::vector<int>>& levels_per_axis,
                               const FnND& f, double reference) {
    const int d = static_cast<int>(dists.size());
    if (d < 1 || levels_per_axis.size() != dists.size())
        throw std::invalid_argument("expansion_check: axis count mismatch");
    for (const auto& ls : levels_per_axis)
        if (ls.empty()) throw std::invalid_argument("expansion_check: empty level list");

    // full factorial design over per-axis levels
    std::vector<std::vector<int>> designs;
    std::vector<std::size_t> pick(d, 0);
    while (true) {
        std::vector<int> row(d);
        for (int k = 0; k < d; ++k) row[k] = levels_per_axis[k][pick[k]];
        designs.push_back(std::move(row));
        int k = d - 1;
        while (k >= 0 && ++pick[k] == levels_per_axis[k].size()) pick[k--] = 0;
        if (k < 0) break;
    }

    std::vector<double> errors;
    for (const auto& lv : designs) {
        ProductGrid pg;
        for (int k = 0; k < d; ++k) pg.axes.push_back(store.get(dists[k], lv[k]));
        errors.push_back(reference - product_expectation(pg, f));
    }

    std::vector<std::vector<double>> columns(d);
    for (int k = 0; k < d; ++k) {
        columns[k].reserve(designs.size());
        for (const auto& lv : designs)
            columns[k].push_back(1.0 / (static_cast<double>(lv[k]) * lv[k]));
    }
    ExpansionCheck out;
    out.coefficients = least_squares(columns, errors);
    for (std::size_t i = 0; i < designs.size(); ++i) {
        double fitted = 0.0;
        for (int k = 0; k < d; ++k) fitted += out.coefficients[k] * columns[k][i];
        out.rows.push_back({designs[i], errors[i], fitted});
    }
    return out;
}

} // namespace qcub
