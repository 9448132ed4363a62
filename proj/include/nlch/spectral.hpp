#ifndef NLCH_SPECTRAL_HPP_
#define NLCH_SPECTRAL_HPP_

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "nlch/grid.hpp"

namespace nlch {

namespace detail {

enum class PlanKind { DctForward, DctInverse, DftForward, DftBackward, RealToComplex, ComplexToReal };

/// Process-wide FFTW plan cache. Planning is serialised; execution goes through
/// the new-array interface, which FFTW documents as thread-safe.
class PlanCache {
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(PlanKind kind, int dims, std::size_t n0, std::size_t n1)
    {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(kind, dims, n0, n1);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        fftw_plan p = make(kind, dims, static_cast<int>(n0), static_cast<int>(n1));
        if (!p) throw std::runtime_error("FFTW planning failed");
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    PlanCache() = default;

    static fftw_plan make(PlanKind kind, int dims, int n0, int n1)
    {
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        const int n[2] = {n0, n1};
        const std::size_t total = static_cast<std::size_t>(n0) * (dims == 2 ? n1 : 1);
        const std::size_t csize = total + static_cast<std::size_t>(n0) + 2;
        double* r = fftw_alloc_real(total);
        fftw_complex* c = fftw_alloc_complex(csize);
        fftw_complex* c2 = fftw_alloc_complex(csize);
        fftw_plan p = nullptr;
        switch (kind) {
        case PlanKind::DctForward:
        case PlanKind::DctInverse: {
            const fftw_r2r_kind k = kind == PlanKind::DctForward ? FFTW_REDFT10 : FFTW_REDFT01;
            const fftw_r2r_kind kinds[2] = {k, k};
            double* r2 = fftw_alloc_real(total);
            p = fftw_plan_r2r(dims, n, r, r2, kinds, flags);
            fftw_free(r2);
            break;
        }
        case PlanKind::DftForward:
            p = fftw_plan_dft(dims, n, c, c2, FFTW_FORWARD, flags);
            break;
        case PlanKind::DftBackward:
            p = fftw_plan_dft(dims, n, c, c2, FFTW_BACKWARD, flags);
            break;
        case PlanKind::RealToComplex:
            p = fftw_plan_dft_r2c(dims, n, r, c, flags);
            break;
        case PlanKind::ComplexToReal:
            p = fftw_plan_dft_c2r(dims, n, c, r, flags);
            break;
        }
        fftw_free(r);
        fftw_free(c);
        fftw_free(c2);
        return p;
    }

    std::mutex mutex_;
    std::map<std::tuple<PlanKind, int, std::size_t, std::size_t>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

} // namespace detail

/// Coefficients of a field in the Laplacian eigenbasis of its grid: DCT-II
/// (unnormalised, FFTW REDFT10 convention) for Neumann grids, complex DFT for
/// periodic grids. Exactly one of the two vectors is populated.
struct Spectrum {
    Boundary boundary = Boundary::Neumann;
    std::vector<double> cosine;
    std::vector<std::complex<double>> fourier;

    std::size_t size() const { return boundary == Boundary::Neumann ? cosine.size() : fourier.size(); }
};

/// Discrete Laplacian eigenbasis of a grid. Eigenvalues use the exact
/// continuum symbols: (pi k / L)^2 for Neumann and (2 pi k / L)^2 for periodic.
class SpectralBasis {
public:
    explicit SpectralBasis(const UniformGrid& grid) : grid_(grid)
    {
        const int d = grid.dimension();
        const std::size_t n0 = grid.cells(0);
        const std::size_t n1 = d == 2 ? grid.cells(1) : 1;
        eigenvalues_.resize(grid.size());
        weights_.resize(grid.size());
        auto axis_lambda = [&](int axis, std::size_t k) {
            const double L = grid.extent(axis);
            const auto n = static_cast<long long>(grid.cells(axis));
            if (grid.boundary() == Boundary::Neumann) {
                const double w = std::numbers::pi * static_cast<double>(k) / L;
                return w * w;
            }
            long long kk = static_cast<long long>(k);
            if (kk > n / 2) kk -= n;
            const double w = 2.0 * std::numbers::pi * static_cast<double>(kk) / L;
            return w * w;
        };
        // Parseval weights so that sum |x_j|^2 = sum weight_k |X_k|^2.
        auto axis_weight = [&](int axis, std::size_t k) {
            const double n = static_cast<double>(grid.cells(axis));
            if (grid.boundary() == Boundary::Neumann) return (k == 0 ? 0.5 : 1.0) / (2.0 * n);
            return 1.0 / n;
        };
        for (std::size_t i = 0; i < n0; ++i) {
            for (std::size_t j = 0; j < n1; ++j) {
                const std::size_t idx = i * n1 + j;
                double lam = axis_lambda(0, i);
                double w = axis_weight(0, i);
                if (d == 2) {
                    lam += axis_lambda(1, j);
                    w *= axis_weight(1, j);
                }
                eigenvalues_[idx] = lam;
                weights_[idx] = w;
            }
        }
        max_eigenvalue_ = 0.0;
        for (double l : eigenvalues_) max_eigenvalue_ = std::max(max_eigenvalue_, l);
    }

    const UniformGrid& grid() const { return grid_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double max_eigenvalue() const { return max_eigenvalue_; }

    Spectrum forward(const Field& c) const
    {
        check(c);
        Spectrum s;
        s.boundary = grid_.boundary();
        if (s.boundary == Boundary::Neumann) {
            s.cosine.resize(c.size());
            std::vector<double> in = c.values();
            fftw_execute_r2r(plan(detail::PlanKind::DctForward), in.data(), s.cosine.data());
        } else {
            std::vector<std::complex<double>> in(c.values().begin(), c.values().end());
            s.fourier.resize(c.size());
            fftw_execute_dft(plan(detail::PlanKind::DftForward), detail::as_fftw(in.data()),
                             detail::as_fftw(s.fourier.data()));
        }
        return s;
    }

    Field inverse(const Spectrum& s) const
    {
        Field out(grid_);
        const double n = static_cast<double>(grid_.size());
        if (s.boundary == Boundary::Neumann) {
            std::vector<double> in = s.cosine;
            fftw_execute_r2r(plan(detail::PlanKind::DctInverse), in.data(), out.values().data());
            const double scale = 1.0 / (n * (grid_.dimension() == 2 ? 4.0 : 2.0));
            for (double& v : out.values()) v *= scale;
        } else {
            std::vector<std::complex<double>> in = s.fourier;
            std::vector<std::complex<double>> tmp(in.size());
            fftw_execute_dft(plan(detail::PlanKind::DftBackward), detail::as_fftw(in.data()),
                             detail::as_fftw(tmp.data()));
            for (std::size_t i = 0; i < tmp.size(); ++i) out[i] = tmp[i].real() / n;
        }
        return out;
    }

    /// Multiplies every mode k by g(lambda_k).
    template <class G>
    void scale(Spectrum& s, G&& g) const
    {
        if (s.boundary == Boundary::Neumann)
            for (std::size_t k = 0; k < s.cosine.size(); ++k) s.cosine[k] *= g(eigenvalues_[k]);
        else
            for (std::size_t k = 0; k < s.fourier.size(); ++k) s.fourier[k] *= g(eigenvalues_[k]);
    }

    /// out_k <- fn(lambda_k, out_k, other_k), with `fn` generic over the coefficient type.
    template <class Fn>
    void combine(Spectrum& out, const Spectrum& other, Fn&& fn) const
    {
        if (out.boundary == Boundary::Neumann)
            for (std::size_t k = 0; k < out.cosine.size(); ++k)
                out.cosine[k] = fn(eigenvalues_[k], out.cosine[k], other.cosine[k]);
        else
            for (std::size_t k = 0; k < out.fourier.size(); ++k)
                out.fourier[k] = fn(eigenvalues_[k], out.fourier[k], other.fourier[k]);
    }

    /// Applies the spectral multiplier g(lambda).
    template <class G>
    Field apply(const Field& c, G&& g) const
    {
        Spectrum s = forward(c);
        scale(s, g);
        return inverse(s);
    }

    /// cell_volume * sum_k w(lambda_k) |c_k|^2 in orthonormal scaling; w == 1 gives ||c||_{L2}^2.
    template <class W>
    double weighted_square_sum(const Spectrum& s, W&& w) const
    {
        double acc = 0.0;
        if (s.boundary == Boundary::Neumann)
            for (std::size_t k = 0; k < s.cosine.size(); ++k)
                acc += w(eigenvalues_[k]) * weights_[k] * s.cosine[k] * s.cosine[k];
        else
            for (std::size_t k = 0; k < s.fourier.size(); ++k)
                acc += w(eigenvalues_[k]) * weights_[k] * std::norm(s.fourier[k]);
        return acc * grid_.cell_volume();
    }

    /// Mean of the field recovered from its zero mode.
    double zero_mode_mean(const Spectrum& s) const
    {
        const double n = static_cast<double>(grid_.size());
        if (s.boundary == Boundary::Neumann)
            return s.cosine[0] / (n * (grid_.dimension() == 2 ? 4.0 : 2.0));
        return s.fourier[0].real() / n;
    }

private:
    fftw_plan plan(detail::PlanKind kind) const
    {
        return detail::PlanCache::instance().get(kind, grid_.dimension(), grid_.cells(0),
                                                 grid_.dimension() == 2 ? grid_.cells(1) : 1);
    }

    void check(const Field& c) const
    {
        if (!(c.grid() == grid_)) throw std::invalid_argument("field grid does not match basis");
    }

    UniformGrid grid_;
    std::vector<double> eigenvalues_;
    std::vector<double> weights_;
    double max_eigenvalue_ = 0.0;
};

} // namespace nlch

#endif // NLCH_SPECTRAL_HPP_
