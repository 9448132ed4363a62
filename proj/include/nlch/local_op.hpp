#ifndef NLCH_LOCAL_OP_HPP_
#define NLCH_LOCAL_OP_HPP_

#include <cmath>
#include <stdexcept>

#include "nlch/grid.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

/// Spectral Laplacian (Neumann: DCT-II, periodic: DFT).
inline Field laplacian(const SpectralBasis& basis, const Field& c)
{
    return basis.apply(c, [](double lambda) { return -lambda; });
}

inline Field laplacian(const Field& c) { return laplacian(SpectralBasis(c.grid()), c); }

inline Field bilaplacian(const SpectralBasis& basis, const Field& c)
{
    return basis.apply(c, [](double lambda) { return lambda * lambda; });
}

/// True when |integral of c| <= tol * integral of |c|.
inline bool has_zero_mean(const Field& c, double tol = 1e-10)
{
    double abs_sum = 0.0;
    double sum = 0.0;
    for (double v : c.values()) {
        sum += v;
        abs_sum += std::abs(v);
    }
    return std::abs(sum) <= tol * abs_sum + 1e-300;
}

/// (-Delta)^{-1} on mean-zero fields; the result has zero mean. Inputs whose
/// mean is not negligible are rejected, callers split the mean off first.
inline Field inv_neumann_laplacian(const SpectralBasis& basis, const Field& c)
{
    if (!has_zero_mean(c))
        throw std::invalid_argument("inverse Laplacian needs a mean-zero field; split off the mean");
    return basis.apply(c, [](double lambda) { return lambda > 0.0 ? 1.0 / lambda : 0.0; });
}

inline Field inv_neumann_laplacian(const Field& c)
{
    return inv_neumann_laplacian(SpectralBasis(c.grid()), c);
}

/// (1/2) integral of |grad c|^2, evaluated spectrally.
inline double dirichlet_energy(const SpectralBasis& basis, const Field& c)
{
    return 0.5 * basis.weighted_square_sum(basis.forward(c), [](double lambda) { return lambda; });
}

inline double dirichlet_energy(const Field& c) { return dirichlet_energy(SpectralBasis(c.grid()), c); }

} // namespace nlch

#endif // NLCH_LOCAL_OP_HPP_
