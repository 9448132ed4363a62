#ifndef NLCH_NORMS_HPP_
#define NLCH_NORMS_HPP_

#include <cmath>
#include <stdexcept>

#include "nlch/grid.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

/// (sum_k (1 + lambda_k)^s |c_k|^2)^{1/2} with orthonormal coefficients, s in [-1, 3].
inline double sobolev_norm(const SpectralBasis& basis, const Field& c, double s)
{
    if (s < -1.0 || s > 3.0) throw std::invalid_argument("Sobolev index must lie in [-1, 3]");
    const Spectrum spec = basis.forward(c);
    if (s == 0.0) return std::sqrt(basis.weighted_square_sum(spec, [](double) { return 1.0; }));
    return std::sqrt(
        basis.weighted_square_sum(spec, [s](double lambda) { return std::pow(1.0 + lambda, s); }));
}

inline double sobolev_norm(const Field& c, double s)
{
    return sobolev_norm(SpectralBasis(c.grid()), c, s);
}

/// ||grad (-Delta_N)^{-1}(c - mean)||_{L2} + |mean| |Omega|^{1/2}.
inline double hminus1_norm(const SpectralBasis& basis, const Field& c)
{
    const Spectrum spec = basis.forward(c);
    const double fluct = basis.weighted_square_sum(
        spec, [](double lambda) { return lambda > 0.0 ? 1.0 / lambda : 0.0; });
    const double m = basis.zero_mode_mean(spec);
    return std::sqrt(fluct) + std::abs(m) * std::sqrt(c.grid().volume());
}

inline double hminus1_norm(const Field& c) { return hminus1_norm(SpectralBasis(c.grid()), c); }

} // namespace nlch

#endif // NLCH_NORMS_HPP_
