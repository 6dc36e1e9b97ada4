#include "oflm/rng.hpp"

#include <algorithm>
#include <array>

namespace oflm {

Rng::Rng(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6f666c6du};
    eng_.seed(seq);
}

double Rng::uniform() {
    // 53 random bits, shifted off zero
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_(eng_); }

std::uint64_t Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> d(mean);
    return d(eng_);
}

std::size_t Rng::categorical(const double* cumulative, std::size_t n) {
    const double u = uniform() * cumulative[n - 1];
    const auto it = std::upper_bound(cumulative, cumulative + n, u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative), n - 1);
}

}  // namespace oflm
