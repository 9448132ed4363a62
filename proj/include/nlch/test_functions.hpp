#ifndef NLCH_TEST_FUNCTIONS_HPP_
#define NLCH_TEST_FUNCTIONS_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nlch/grid.hpp"

namespace nlch {

namespace detail {

inline constexpr double pi = std::numbers::pi;

/// exp(4 - 1/(s(1-s))): C-infinity, equal to 1 at s = 1/2, flat to all orders at s = 0, 1.
inline double flat_window(double s)
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(4.0 - 1.0 / (s * (1.0 - s)));
}

/// Profiles on the unit interval, s = x / L.
inline double profile_1d(std::string_view name, double s)
{
    if (name == "constant") return 1.0;
    if (name == "cospix") return std::cos(pi * s);
    if (name == "cos2pix") return std::cos(2.0 * pi * s);
    if (name == "sinmix") return std::sin(2.0 * pi * s) + 0.5 * std::sin(4.0 * pi * s);
    if (name == "windowed-cos") return std::cos(2.0 * pi * s) * flat_window(s);
    if (name == "ch-initial") return 0.1 + 0.3 * std::cos(pi * s) + 0.15 * std::cos(2.0 * pi * s);
    if (name == "ac-initial") return 0.2 + 0.4 * std::cos(pi * s) + 0.2 * std::cos(2.0 * pi * s);
    throw std::invalid_argument("unknown test function '" + std::string(name) + "'");
}

} // namespace detail

/// Names accepted by sample_named.
inline const std::vector<std::string>& test_function_names()
{
    static const std::vector<std::string> names = {"constant", "cospix",     "cos2pix",   "sinmix",
                                                   "windowed-cos", "ch-initial", "ac-initial"};
    return names;
}

/// Samples a named profile on the grid. In 2D the profile is the tensor
/// product of the 1D profile along each axis ("constant" stays 1; the initial
/// data profiles add rather than multiply so the mean stays off zero).
inline Field sample_named(const UniformGrid& grid, std::string_view name)
{
    const double L0 = grid.extent(0);
    if (grid.dimension() == 1)
        return sample(grid, [&](double x) { return detail::profile_1d(name, x / L0); });
    const double L1 = grid.extent(1);
    const bool additive = name == "ch-initial" || name == "ac-initial";
    return sample(grid, [&](double x, double y) {
        const double a = detail::profile_1d(name, x / L0);
        const double b = detail::profile_1d(name, y / L1);
        return additive ? 0.5 * (a + b) : a * b;
    });
}

} // namespace nlch

#endif // NLCH_TEST_FUNCTIONS_HPP_
