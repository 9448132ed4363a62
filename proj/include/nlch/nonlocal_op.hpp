#ifndef NLCH_NONLOCAL_OP_HPP_
#define NLCH_NONLOCAL_OP_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

/// Receives diagnostics such as under-resolved kernels. Defaults to stderr.
inline std::function<void(const std::string&)>& warning_handler()
{
    static std::function<void(const std::string&)> handler = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}

/// Kernel must be sampled with h <= eps R / 4 on every axis.
inline bool resolves(const Kernel& k, const UniformGrid& g)
{
    return g.max_spacing() <= k.support() / 4.0 * (1.0 + 1e-12);
}

inline void warn_if_under_resolved(const Kernel& k, const UniformGrid& g)
{
    if (!resolves(k, g)) {
        std::ostringstream os;
        os << "grid spacing " << g.max_spacing() << " does not resolve kernel support "
           << k.support() << " (need h <= eps R / 4)";
        warning_handler()(os.str());
    }
}

namespace detail {

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
inline std::size_t fft_friendly_size(std::size_t n)
{
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

inline std::array<long, 2> stencil_reach(const Kernel& k, const UniformGrid& g)
{
    std::array<long, 2> reach{0, 0};
    for (int a = 0; a < g.dimension(); ++a)
        reach[a] = static_cast<long>(std::ceil(k.support() / g.spacing(a)));
    return reach;
}

inline void require_periodic_fit(const Kernel& k, const UniformGrid& g)
{
    for (int a = 0; a < g.dimension(); ++a)
        if (k.support() >= 0.5 * g.extent(a))
            throw std::invalid_argument("kernel support must be below half the periodic box");
}

inline double distance(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

inline long wrap(long i, long n)
{
    const long r = i % n;
    return r < 0 ? r + n : r;
}

} // namespace detail

/// Degree function a_eps(x_i) = sum over nodes y_j in Omega of J_eps(x_i - y_j) h^n,
/// by direct summation. On periodic grids the sum runs over the torus.
inline Field degree_function(const Kernel& k, const UniformGrid& g)
{
    const bool periodic = g.boundary() == Boundary::Periodic;
    if (periodic) detail::require_periodic_fit(k, g);
    const auto reach = detail::stencil_reach(k, g);
    const long n0 = static_cast<long>(g.cells(0));
    const long n1 = g.dimension() == 2 ? static_cast<long>(g.cells(1)) : 1;
    const double h0 = g.spacing(0);
    const double h1 = g.dimension() == 2 ? g.spacing(1) : 0.0;
    const double vol = g.cell_volume();
    Field a(g);
    for (long i = 0; i < n0; ++i) {
        for (long j = 0; j < n1; ++j) {
            double sum = 0.0;
            for (long p = i - reach[0]; p <= i + reach[0]; ++p) {
                if (!periodic && (p < 0 || p >= n0)) continue;
                for (long q = j - reach[1]; q <= j + reach[1]; ++q) {
                    if (!periodic && (q < 0 || q >= n1)) continue;
                    sum += k.radial(detail::distance((p - i) * h0, (q - j) * h1));
                }
            }
            a[static_cast<std::size_t>(i * n1 + j)] = sum * vol;
        }
    }
    return a;
}

/// L_eps c(x_i) = sum_j J_eps(x_i - y_j) (c(x_i) - c(y_j)) h^n by direct midpoint
/// summation over the kernel support. Serves as the reference implementation.
inline Field apply_direct(const Kernel& k, const Field& c)
{
    const UniformGrid& g = c.grid();
    warn_if_under_resolved(k, g);
    const bool periodic = g.boundary() == Boundary::Periodic;
    if (periodic) detail::require_periodic_fit(k, g);
    const auto reach = detail::stencil_reach(k, g);
    const long n0 = static_cast<long>(g.cells(0));
    const long n1 = g.dimension() == 2 ? static_cast<long>(g.cells(1)) : 1;
    const double h0 = g.spacing(0);
    const double h1 = g.dimension() == 2 ? g.spacing(1) : 0.0;
    const double vol = g.cell_volume();
    Field out(g);
    for (long i = 0; i < n0; ++i) {
        for (long j = 0; j < n1; ++j) {
            const double ci = c[static_cast<std::size_t>(i * n1 + j)];
            double sum = 0.0;
            for (long p = i - reach[0]; p <= i + reach[0]; ++p) {
                if (!periodic && (p < 0 || p >= n0)) continue;
                const long pp = detail::wrap(p, n0);
                for (long q = j - reach[1]; q <= j + reach[1]; ++q) {
                    if (!periodic && (q < 0 || q >= n1)) continue;
                    const long qq = detail::wrap(q, n1);
                    const double w = k.radial(detail::distance((p - i) * h0, (q - j) * h1));
                    if (w != 0.0) sum += w * (ci - c[static_cast<std::size_t>(pp * n1 + qq)]);
                }
            }
            out[static_cast<std::size_t>(i * n1 + j)] = sum * vol;
        }
    }
    return out;
}

/// L_eps on a fixed grid via FFT convolution. On Neumann (bounded-box) grids the
/// field is zero-extended outside Omega and the degree function carries the
/// Omega-restriction; on periodic grids the convolution is circular.
/// Uses the same midpoint weights as apply_direct.
class NonlocalOperator {
public:
    NonlocalOperator(const Kernel& kernel, const UniformGrid& grid)
        : kernel_(kernel), grid_(grid), degree_(grid)
    {
        warn_if_under_resolved(kernel, grid);
        const int d = grid.dimension();
        const bool periodic = grid.boundary() == Boundary::Periodic;
        if (periodic) detail::require_periodic_fit(kernel, grid);
        const auto reach = detail::stencil_reach(kernel, grid);
        for (int a = 0; a < 2; ++a) {
            const std::size_t n = a < d ? grid.cells(a) : 1;
            cells_[a] = n;
            padded_[a] = a >= d ? 1
                         : periodic ? n
                                    : detail::fft_friendly_size(n + static_cast<std::size_t>(reach[a]));
        }
        padded_total_ = padded_[0] * padded_[1];
        spectrum_size_ = d == 1 ? padded_[0] / 2 + 1 : padded_[0] * (padded_[1] / 2 + 1);

        // Stencil laid out circularly on the padded box.
        std::vector<double> stencil(padded_total_, 0.0);
        const double h0 = grid.spacing(0);
        const double h1 = d == 2 ? grid.spacing(1) : 0.0;
        const double vol = grid.cell_volume();
        const long P0 = static_cast<long>(padded_[0]);
        const long P1 = static_cast<long>(padded_[1]);
        for (long p = -reach[0]; p <= reach[0]; ++p)
            for (long q = -reach[1]; q <= reach[1]; ++q) {
                const double w = kernel.radial(detail::distance(p * h0, q * h1)) * vol;
                if (w == 0.0) continue;
                stencil[static_cast<std::size_t>(detail::wrap(p, P0) * P1 + detail::wrap(q, P1))] += w;
            }
        stencil_hat_.resize(spectrum_size_);
        fftw_execute_dft_r2c(plan(detail::PlanKind::RealToComplex), stencil.data(),
                             detail::as_fftw(stencil_hat_.data()));

        if (periodic) {
            double mass = 0.0;
            for (double w : stencil) mass += w;
            std::fill(degree_.values().begin(), degree_.values().end(), mass);
        } else {
            degree_ = convolve(Field(grid, 1.0));
        }
        max_degree_ = linf_norm(degree_);
    }

    const Kernel& kernel() const { return kernel_; }
    const UniformGrid& grid() const { return grid_; }
    const Field& degree() const { return degree_; }
    double max_degree() const { return max_degree_; }

    /// sum_j J_eps(x_i - y_j) c_j h^n over nodes of Omega (zero extension).
    Field convolve(const Field& c) const
    {
        std::vector<double> buf(padded_total_, 0.0);
        for (std::size_t i = 0; i < cells_[0]; ++i)
            for (std::size_t j = 0; j < cells_[1]; ++j)
                buf[i * padded_[1] + j] = c[i * cells_[1] + j];
        std::vector<std::complex<double>> hat(spectrum_size_);
        fftw_execute_dft_r2c(plan(detail::PlanKind::RealToComplex), buf.data(), detail::as_fftw(hat.data()));
        for (std::size_t k = 0; k < spectrum_size_; ++k) hat[k] *= stencil_hat_[k];
        fftw_execute_dft_c2r(plan(detail::PlanKind::ComplexToReal), detail::as_fftw(hat.data()), buf.data());
        const double scale = 1.0 / static_cast<double>(padded_total_);
        Field out(grid_);
        for (std::size_t i = 0; i < cells_[0]; ++i)
            for (std::size_t j = 0; j < cells_[1]; ++j)
                out[i * cells_[1] + j] = buf[i * padded_[1] + j] * scale;
        return out;
    }

    /// L_eps c = a_eps c - J_eps * c. A constant shift is removed first; L_eps
    /// annihilates constants, so this is exact and maps constants to exactly zero.
    Field apply(const Field& c) const
    {
        if (!(c.grid() == grid_)) throw std::invalid_argument("field grid does not match operator");
        Field shifted = c;
        const double shift = c[0];
        for (double& v : shifted.values()) v -= shift;
        Field out = convolve(shifted);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = degree_[i] * shifted[i] - out[i];
        return out;
    }

    /// E_eps(c) = (1/4) double integral of J |c(x) - c(y)|^2 = (1/2) <L_eps c, c>.
    double energy(const Field& c) const { return 0.5 * inner(apply(c), c); }

private:
    fftw_plan plan(detail::PlanKind kind) const
    {
        return detail::PlanCache::instance().get(kind, grid_.dimension(), padded_[0],
                                                 grid_.dimension() == 2 ? padded_[1] : 1);
    }

    Kernel kernel_;
    UniformGrid grid_;
    std::array<std::size_t, 2> cells_{1, 1};
    std::array<std::size_t, 2> padded_{1, 1};
    std::size_t padded_total_ = 1;
    std::size_t spectrum_size_ = 1;
    std::vector<std::complex<double>> stencil_hat_;
    Field degree_;
    double max_degree_ = 0.0;
};

inline Field apply_fft(const Kernel& k, const Field& c) { return NonlocalOperator(k, c.grid()).apply(c); }

/// E_eps(c) through (1/2) <L_eps c, c>.
inline double nonlocal_energy(const Kernel& k, const Field& c)
{
    return NonlocalOperator(k, c.grid()).energy(c);
}

/// Brute-force sum over all node pairs of J_eps(x_i - x_j) |c_i - c_j|^2 h^{2n}.
/// O(N^2); meant for small grids.
inline double pair_interaction_sum(const Kernel& k, const Field& c)
{
    const UniformGrid& g = c.grid();
    const bool periodic = g.boundary() == Boundary::Periodic;
    const std::size_t n1 = g.dimension() == 2 ? g.cells(1) : 1;
    const double h0 = g.spacing(0);
    const double h1 = g.dimension() == 2 ? g.spacing(1) : 0.0;
    auto offset = [&](double d, double L) {
        if (!periodic) return d;
        return d - L * std::round(d / L);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double dx = offset((static_cast<double>(i / n1) - static_cast<double>(j / n1)) * h0,
                                     g.extent(0));
            const double dy = g.dimension() == 2
                                  ? offset((static_cast<double>(i % n1) - static_cast<double>(j % n1)) * h1,
                                           g.extent(1))
                                  : 0.0;
            const double diff = c[i] - c[j];
            sum += k.radial(detail::distance(dx, dy)) * diff * diff;
        }
    const double vol = g.cell_volume();
    return sum * vol * vol;
}

/// E_eps by its defining double integral, (1/4) pair_interaction_sum.
inline double nonlocal_energy_double_sum(const Kernel& k, const Field& c)
{
    return 0.25 * pair_interaction_sum(k, c);
}

/// L2 norm over the interior box {dist(x, boundary) >= margin} of
/// R_eps c(x) = integral over the complement of Omega of J_eps(x - y)(c(x) - c~(y)) dy,
/// where c~ is the even reflection of c across the faces of the box.
inline double interior_remainder(const Kernel& k, const Field& c, double margin)
{
    const UniformGrid& g = c.grid();
    if (g.boundary() != Boundary::Neumann)
        throw std::invalid_argument("interior remainder is defined on bounded (Neumann) boxes");
    for (int a = 0; a < g.dimension(); ++a)
        if (margin >= 0.5 * g.extent(a)) throw std::invalid_argument("margin leaves an empty interior");
    const auto reach = detail::stencil_reach(k, g);
    const long n0 = static_cast<long>(g.cells(0));
    const long n1 = g.dimension() == 2 ? static_cast<long>(g.cells(1)) : 1;
    const double h0 = g.spacing(0);
    const double h1 = g.dimension() == 2 ? g.spacing(1) : 0.0;
    auto reflect = [](long i, long n) {
        if (i < 0) return -1 - i;
        if (i >= n) return 2 * n - 1 - i;
        return i;
    };
    auto inside = [&](int axis, long i) {
        const double x = g.node(axis, static_cast<std::size_t>(i));
        return x >= margin && x <= g.extent(axis) - margin;
    };
    double acc = 0.0;
    for (long i = 0; i < n0; ++i) {
        if (!inside(0, i)) continue;
        for (long j = 0; j < n1; ++j) {
            if (g.dimension() == 2 && !inside(1, j)) continue;
            const double ci = c[static_cast<std::size_t>(i * n1 + j)];
            double r = 0.0;
            for (long p = i - reach[0]; p <= i + reach[0]; ++p)
                for (long q = j - reach[1]; q <= j + reach[1]; ++q) {
                    const bool ghost = p < 0 || p >= n0 || q < 0 || q >= n1;
                    if (!ghost) continue;
                    const double w = k.radial(detail::distance((p - i) * h0, (q - j) * h1));
                    if (w == 0.0) continue;
                    r += w * (ci - c[static_cast<std::size_t>(reflect(p, n0) * n1 + reflect(q, n1))]);
                }
            r *= g.cell_volume();
            acc += r * r;
        }
    }
    return std::sqrt(acc * g.cell_volume());
}

} // namespace nlch

#endif // NLCH_NONLOCAL_OP_HPP_
