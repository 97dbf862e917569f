#include "quantcub/grid_store.hpp"

#include <cstdio>
#include <stdexcept>

namespace qcub {

GridStore::GridStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_);
}

std::filesystem::path GridStore::file_for(const Distribution& dist, int n) const {
    char buf[128];
    switch (dist.kind()) {
    case DistKind::normal:
        std::snprintf(buf, sizeof buf, "normal_%.12g_%.12g_N%d.csv", dist.param1(),
                      dist.param2(), n);
        break;
    case DistKind::lognormal:
        std::snprintf(buf, sizeof buf, "lognormal_%.12g_%.12g_N%d.csv", dist.param1(),
                      dist.param2(), n);
        break;
    case DistKind::uniform:
        std::snprintf(buf, sizeof buf, "uniform_%.12g_%.12g_N%d.csv", dist.param1(),
                      dist.param2(), n);
        break;
    case DistKind::exponential:
        std::snprintf(buf, sizeof buf, "exponential_%.12g_N%d.csv", dist.param1(), n);
        break;
    }
    return *dir_ / buf;
}

const QuantizerGrid& GridStore::insert(const std::string& key, QuantizerGrid grid) {
    return cache_.insert_or_assign(key, std::move(grid)).first->second;
}

const QuantizerGrid& GridStore::get(const Distribution& dist, int n) {
    if (n < 1) throw std::invalid_argument("GridStore::get: level must be >= 1");
    const std::string key = dist.to_string() + "|" + std::to_string(n);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    // Normal grids rescale from the standard one, which is the only grid
    // worth persisting across parameter sets.
    if (dist.kind() == DistKind::normal &&
        !(dist.param1() == 0.0 && dist.param2() == 1.0)) {
        const QuantizerGrid& std_grid = get(Distribution::normal(0.0, 1.0), n);
        QuantizerGrid g{dist, std_grid.points, std_grid.weights, 0.0};
        for (double& x : g.points) x = dist.param1() + dist.param2() * x;
        g.distortion = dist.param2() * dist.param2() * std_grid.distortion;
        return insert(key, std::move(g));
    }

    if (dir_) {
        const auto path = file_for(dist, n);
        if (std::filesystem::exists(path)) {
            QuantizerGrid g = read_grid_csv(path);
            if (g.dist == dist && g.level() == n) return insert(key, std::move(g));
            // stale or foreign file: rebuild below and overwrite
        }
        auto [grid, report] = optimize(dist, n, cfg_);
        if (!report.converged)
            throw std::runtime_error("GridStore: optimizer did not converge for " + key);
        write_grid_csv(grid, path);
        return insert(key, std::move(grid));
    }

    auto [grid, report] = optimize(dist, n, cfg_);
    if (!report.converged)
        throw std::runtime_error("GridStore: optimizer did not converge for " + key);
    return insert(key, std::move(grid));
}

} // namespace qcub
