#ifndef NLCH_TESTS_SUPPORT_HPP_
#define NLCH_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <random>

#include "nlch/grid.hpp"

namespace nlch::testing {

/// Uniform values in [lo, hi), reproducible from the seed.
inline Field random_field(const UniformGrid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(g);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

inline Field minus_mean(Field f)
{
    const double m = mean(f);
    for (double& v : f.values()) v -= m;
    return f;
}

} // namespace nlch::testing

#endif
