#include "quantcub/rng.hpp"

#include "quantcub/special_functions.hpp"

namespace qcub {

namespace {
// splitmix64, used only to spread (seed, stream) into engine state
std::uint64_t mix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xa0761d6478bd642fULL * (stream + 1));
    const std::uint64_t a = mix64(s), b = mix64(s), c = mix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    eng_.seed(seq);
}

double Rng::u01() {
    // 53 random bits, offset by half an ulp so 0 and 1 are never returned
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gauss() { return normal_inv_cdf(u01()); }

} // namespace qcub
