#pragma once

#include <cstdint>
#include <random>

namespace oflm {

// Per-replication random stream. Replication r of a run seeded with `master`
// always sees the same sequence, whatever order replications are executed in.
class Rng {
public:
    Rng(std::uint64_t master, std::uint64_t stream);

    double uniform();  // (0, 1)
    double normal();
    std::uint64_t poisson(double mean);
    std::size_t categorical(const double* cumulative, std::size_t n);  // cumulative[n-1] = total

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_;
};

}  // namespace oflm
