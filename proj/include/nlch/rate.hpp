#ifndef NLCH_RATE_HPP_
#define NLCH_RATE_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nlch {

/// Acceptance interval for a fitted slope.
struct Band {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Empirical convergence table: log(error) = slope * log(eps) + intercept,
/// fitted by least squares over the points flagged `included`.
struct RateTable {
    std::vector<double> epsilons;
    std::vector<double> errors;
    std::vector<bool> included;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    /// Every error sits at or below the floor: the quantity is reproduced exactly
    /// and no rate can be fitted.
    bool exact = false;

    std::size_t fitted_points() const
    {
        std::size_t n = 0;
        for (bool b : included) n += b;
        return n;
    }
};

/// Least-squares slope in log-log coordinates. Errors at or below `floor` are
/// kept in the table but excluded from the fit.
inline RateTable fit_rate(std::vector<double> epsilons, std::vector<double> errors, double floor = 0.0)
{
    if (epsilons.size() != errors.size()) throw std::invalid_argument("epsilon/error length mismatch");
    if (epsilons.size() < 3) throw std::invalid_argument("rate fit needs at least 3 points");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw std::invalid_argument("epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("epsilons must be strictly decreasing");
        if (!(errors[i] >= 0.0) || !std::isfinite(errors[i]))
            throw std::invalid_argument("errors must be finite and non-negative");
    }
    RateTable t;
    t.epsilons = std::move(epsilons);
    t.errors = std::move(errors);
    t.included.resize(t.errors.size());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.errors.size(); ++i) {
        t.included[i] = t.errors[i] > floor;
        if (t.included[i]) {
            xs.push_back(std::log(t.epsilons[i]));
            ys.push_back(std::log(t.errors[i]));
        }
    }
    if (xs.empty()) {
        t.exact = true;
        return t;
    }
    if (xs.size() < 2) return t;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    t.slope = sxy / sxx;
    t.intercept = my - t.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (t.slope * xs[i] + t.intercept);
        ss_res += r * r;
    }
    t.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return t;
}

inline bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

} // namespace nlch

#endif // NLCH_RATE_HPP_
