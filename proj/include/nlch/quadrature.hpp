#ifndef NLCH_QUADRATURE_HPP_
#define NLCH_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nlch {

/// Relative tolerance used for all radial kernel integrals.
inline constexpr double kQuadratureTolerance = 1e-13;

namespace detail {

template <class F>
double adaptive_panel(F& f, double a, double b, double abs_tol, int depth)
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    const double est = Rule::integrate(f, a, b, 0, 0.0, &err);
    if (err <= abs_tol || depth == 0) return est;
    const double mid = 0.5 * (a + b);
    return adaptive_panel(f, a, mid, 0.5 * abs_tol, depth - 1)
           + adaptive_panel(f, mid, b, 0.5 * abs_tol, depth - 1);
}

} // namespace detail

/// Adaptive Gauss-Kronrod (31-point panels, bisection). The tolerance is
/// relative to max(L1 norm of the integrand, scale_hint); pass a hint when the
/// integrand itself is expected to cancel to rounding noise.
template <class F>
double integrate_adaptive(F&& f, double a, double b,
                          double tol = kQuadratureTolerance, double scale_hint = 0.0)
{
    if (a == b) return 0.0;
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    double l1 = 0.0;
    const double est = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
    const double abs_tol = tol * std::max(l1, scale_hint);
    if (err <= abs_tol) return est;
    const double mid = 0.5 * (a + b);
    return detail::adaptive_panel(f, a, mid, 0.5 * abs_tol, 12)
           + detail::adaptive_panel(f, mid, b, 0.5 * abs_tol, 12);
}

/// Composite trapezoid over a full period [0, 2*pi) with `points` nodes.
/// Spectrally accurate for smooth periodic integrands.
template <class F>
double integrate_periodic(F&& f, int points)
{
    const double step = 2.0 * std::numbers::pi / points;
    double sum = 0.0;
    for (int j = 0; j < points; ++j) sum += f(j * step);
    return sum * step;
}

} // namespace nlch

#endif // NLCH_QUADRATURE_HPP_
