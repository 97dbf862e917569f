#ifndef QUANTCUB_RNG_HPP
#define QUANTCUB_RNG_HPP

#include <cstdint>
#include <random>

namespace qcub {

/// Deterministic random stream. A (seed, stream) pair fully determines the
/// sequence, so replications can run on independent streams and any
/// experiment is reproducible from its seed alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform draw strictly inside (0,1).
    double u01();

    /// Standard normal draw via the inverse CDF.
    double gauss();

    std::uint64_t next_u64() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

} // namespace qcub

#endif
