#ifndef NLCH_KERNEL_HPP_
#define NLCH_KERNEL_HPP_

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nlch/quadrature.hpp"

namespace nlch {

/// Radial bump shapes s(r) on [0, 1). Every profile carries an r^2 factor so
/// that s(r)/r^2 stays bounded and the interaction kernel is a smooth bump.
enum class Profile {
    Poly2_3, ///< r^2 (1 - r^2)^3
    Poly2_4, ///< r^2 (1 - r^2)^4
};

inline Profile parse_profile(std::string_view name)
{
    if (name == "poly-2-3") return Profile::Poly2_3;
    if (name == "poly-2-4") return Profile::Poly2_4;
    throw std::invalid_argument("unsupported mollifier profile '" + std::string(name) + "'");
}

inline std::string_view to_string(Profile p)
{
    switch (p) {
    case Profile::Poly2_3: return "poly-2-3";
    case Profile::Poly2_4: return "poly-2-4";
    }
    return "?";
}

/// Surface measure of the unit sphere S^{n-1}: 2 for n = 1, 2*pi for n = 2.
inline double sphere_measure(int n)
{
    if (n == 1) return 2.0;
    if (n == 2) return 2.0 * std::numbers::pi;
    throw std::invalid_argument("dimension must be 1 or 2");
}

/// C_n = integral over S^{n-1} of |e_1 . sigma|^2, which equals omega_n / n.
inline double isotropy_constant(int n) { return sphere_measure(n) / n; }

/// Radial mollifier profile rho(r) = norm_constant * s(|r|), supported in |r| < R.
struct MollifierSpec {
    int dimension = 1;
    Profile profile = Profile::Poly2_3;
    double support_radius = 1.0;
    double norm_constant = 1.0;

    /// Unnormalised shape divided by r^2, analytic everywhere (including r = 0).
    double shape_over_r2(double r) const
    {
        const double s = std::abs(r) / support_radius;
        if (s >= 1.0) return 0.0;
        const double q = 1.0 - s * s;
        const double q3 = q * q * q;
        const double base = profile == Profile::Poly2_3 ? q3 : q3 * q;
        return base / (support_radius * support_radius);
    }

    double shape(double r) const { return r * r * shape_over_r2(r); }

    double operator()(double r) const { return norm_constant * shape(r); }
};

/// Target value of the radial normalisation integral, 2 / C_n.
inline double normalization_target(int n) { return 2.0 / isotropy_constant(n); }

/// Integral of rho(r) r^{n-1} over (0, infinity).
inline double radial_mass(const MollifierSpec& m)
{
    const int n = m.dimension;
    return integrate_adaptive(
        [&](double r) { return m(r) * std::pow(r, n - 1); }, 0.0, m.support_radius);
}

/// Builds a mollifier whose radial mass equals 2 / C_n. The normalisation
/// constant is obtained by quadrature so that new profiles need no hand-derived
/// constants.
inline MollifierSpec make_mollifier(int n, Profile profile)
{
    if (n != 1 && n != 2) throw std::invalid_argument("dimension must be 1 or 2");
    MollifierSpec m{n, profile, 1.0, 1.0};
    m.norm_constant = normalization_target(n) / radial_mass(m);
    return m;
}

inline MollifierSpec make_mollifier(int n, std::string_view profile_name)
{
    return make_mollifier(n, parse_profile(profile_name));
}

/// Interaction kernel J_eps(x) = rho_eps(|x|) / |x|^2 with
/// rho_eps(r) = eps^{-n} rho(r / eps).
class Kernel {
public:
    Kernel(MollifierSpec mollifier, double epsilon)
        : mollifier_(mollifier), epsilon_(epsilon)
    {
        if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
        scale_ = std::pow(epsilon_, -mollifier_.dimension);
    }

    const MollifierSpec& mollifier() const { return mollifier_; }
    double epsilon() const { return epsilon_; }
    int dimension() const { return mollifier_.dimension; }

    /// Radius of the ball containing the support of J_eps.
    double support() const { return epsilon_ * mollifier_.support_radius; }

    double rho(double r) const { return scale_ * mollifier_(r / epsilon_); }

    /// J_eps as a function of the distance r = |x|.
    double radial(double r) const
    {
        return scale_ * mollifier_.norm_constant * mollifier_.shape_over_r2(r / epsilon_)
               / (epsilon_ * epsilon_);
    }

    double operator()(std::span<const double> x) const
    {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return radial(std::sqrt(r2));
    }

private:
    MollifierSpec mollifier_;
    double epsilon_;
    double scale_;
};

namespace detail {

inline int angular_points(double radius, double frequency)
{
    return 48 + 2 * static_cast<int>(std::ceil(radius * frequency));
}

/// Integral over R^n of g(r, direction) J_eps(r), where `g` receives the
/// radius and the unit direction (1D: +-1; 2D: (cos t, sin t)).
template <class G>
double integrate_against_kernel(const Kernel& k, G&& g, int angles = 64, double scale_hint = 0.0)
{
    const double R = k.support();
    if (k.dimension() == 1) {
        return integrate_adaptive(
            [&](double r) {
                const double plus[1] = {1.0};
                const double minus[1] = {-1.0};
                return k.radial(r) * (g(r, std::span<const double>(plus))
                                      + g(r, std::span<const double>(minus)));
            },
            0.0, R, kQuadratureTolerance, scale_hint);
    }
    return integrate_adaptive(
        [&](double r) {
            const double angular = integrate_periodic(
                [&](double t) {
                    const double dir[2] = {std::cos(t), std::sin(t)};
                    return g(r, std::span<const double>(dir));
                },
                angles);
            return k.radial(r) * r * angular;
        },
        0.0, R, kQuadratureTolerance, scale_hint);
}

} // namespace detail

/// Integral of J_eps over R^n, i.e. the interior value of the degree function.
inline double total_mass(const Kernel& k)
{
    return detail::integrate_against_kernel(
        k, [](double, std::span<const double>) { return 1.0; });
}

/// Integral of J_eps(|x|) x_axis over R^n; vanishes by odd symmetry.
inline double moment_first(const Kernel& k, int axis)
{
    if (axis < 0 || axis >= k.dimension()) throw std::invalid_argument("axis out of range");
    // The integrand cancels to rounding noise; scale the tolerance by the
    // integral of J_eps |x| instead.
    const double scale = detail::integrate_against_kernel(
        k, [](double r, std::span<const double>) { return r; });
    return detail::integrate_against_kernel(
        k, [axis](double r, std::span<const double> d) { return r * d[axis]; }, 64, scale);
}

/// Same integrand as moment_first restricted to the half space x_axis > 0.
inline double moment_first_one_sided(const Kernel& k, int axis)
{
    if (axis < 0 || axis >= k.dimension()) throw std::invalid_argument("axis out of range");
    return detail::integrate_against_kernel(k, [axis](double r, std::span<const double> d) {
        return d[axis] > 0.0 ? r * d[axis] : 0.0;
    }, 4096);
}

/// Integral of J_eps(|x|) x_axis^2 over R^n. Equals 2 for a normalised kernel.
inline double moment_second(const Kernel& k, int axis)
{
    if (axis < 0 || axis >= k.dimension()) throw std::invalid_argument("axis out of range");
    return detail::integrate_against_kernel(
        k, [axis](double r, std::span<const double> d) { return r * r * d[axis] * d[axis]; });
}

/// (1/2) integral of J_eps(|x|) |x|^2 = (1/2) integral of rho_eps(|x|); equals n.
inline double moment_second_trace(const Kernel& k)
{
    return 0.5 * detail::integrate_against_kernel(
        k, [](double r, std::span<const double>) { return r * r; });
}

/// sigma_eps(xi) = F(J_eps)(0) - F(J_eps)(xi) = integral of J_eps(|x|)(1 - cos(x . xi)).
inline double fourier_symbol(const Kernel& k, std::span<const double> xi)
{
    if (static_cast<int>(xi.size()) != k.dimension())
        throw std::invalid_argument("frequency dimension mismatch");
    double norm2 = 0.0;
    for (double v : xi) norm2 += v * v;
    if (norm2 == 0.0) return 0.0;
    // 1 - cos(a) = 2 sin^2(a/2) keeps precision for small arguments.
    auto g = [&](double r, std::span<const double> d) {
        double phase = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) phase += d[i] * xi[i];
        const double s = std::sin(0.5 * r * phase);
        return 2.0 * s * s;
    };
    return detail::integrate_against_kernel(
        k, g, detail::angular_points(k.support(), std::sqrt(norm2)));
}

} // namespace nlch

#endif // NLCH_KERNEL_HPP_
