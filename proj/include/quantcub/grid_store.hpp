#ifndef QUANTCUB_GRID_STORE_HPP
#define QUANTCUB_GRID_STORE_HPP

#include "quantcub/quantizer.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace qcub {

/// Build-once cache of optimal grids, optionally backed by a directory of
/// grid CSV files. Normal grids are derived from the stored N(0,1) grid by
/// translation and scaling; every other law is optimized per parameter set.
/// Not safe for concurrent mutation; experiments treat a built store as
/// read-only.
class GridStore {
  public:
    GridStore() = default;
    explicit GridStore(std::filesystem::path dir);

    const QuantizerGrid& get(const Distribution& dist, int n);

    const std::optional<std::filesystem::path>& directory() const { return dir_; }

    OptimizeConfig& config() { return cfg_; }

  private:
    const QuantizerGrid& insert(const std::string& key, QuantizerGrid grid);
    std::filesystem::path file_for(const Distribution& dist, int n) const;

    std::map<std::string, QuantizerGrid> cache_;
    std::optional<std::filesystem::path> dir_;
    OptimizeConfig cfg_;
};

} // namespace qcub

#endif
