#ifndef NLCH_SOLVERS_HPP_
#define NLCH_SOLVERS_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/local_op.hpp"
#include "nlch/nonlocal_op.hpp"
#include "nlch/potentials.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

enum class Equation { LocalCH, NonlocalCH, LocalAC, NonlocalAC };

inline Equation parse_equation(std::string_view s)
{
    if (s == "local-ch") return Equation::LocalCH;
    if (s == "nonlocal-ch") return Equation::NonlocalCH;
    if (s == "local-ac") return Equation::LocalAC;
    if (s == "nonlocal-ac") return Equation::NonlocalAC;
    throw std::invalid_argument("unknown equation '" + std::string(s) + "'");
}

inline std::string_view to_string(Equation e)
{
    switch (e) {
    case Equation::LocalCH: return "local-ch";
    case Equation::NonlocalCH: return "nonlocal-ch";
    case Equation::LocalAC: return "local-ac";
    case Equation::NonlocalAC: return "nonlocal-ac";
    }
    return "?";
}

inline bool is_nonlocal(Equation e) { return e == Equation::NonlocalCH || e == Equation::NonlocalAC; }
inline bool conserves_mass(Equation e) { return e == Equation::LocalCH || e == Equation::NonlocalCH; }

enum class Scheme { SemiImplicitStabilized, FullyExplicit };

inline Scheme parse_scheme(std::string_view s)
{
    if (s == "semi-implicit") return Scheme::SemiImplicitStabilized;
    if (s == "explicit") return Scheme::FullyExplicit;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

struct SolverConfig {
    double mobility = 1.0;
    double tau = 1e-5;
    double final_time = 0.05;
    double stabilization = 4.0;
    Scheme scheme = Scheme::SemiImplicitStabilized;
    std::size_t record_every = 1;
    /// Nonlocal flows: treat -Delta implicitly and L_eps + Delta explicitly.
    /// When false only the stabiliser S is implicit and the step size is capped.
    bool local_preconditioner = true;
    /// Downgrades a violated stability rule to a warning.
    bool allow_unstable = false;
    bool keep_fields = false;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<Field> fields;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Amplitude growth factor that counts as divergence.
inline constexpr double kDivergenceGrowth = 1e6;

/// One first-order IMEX step for any of the four gradient flows, diagonal in the
/// grid's Laplacian eigenbasis:
///   c+ = (c - tau g(lambda) r(c)) / (1 + tau g(lambda) (lambda_imp + S)),
/// where g = m lambda for Cahn-Hilliard and 1 for Allen-Cahn, lambda_imp is the
/// implicit part of the linear operator, and r collects every explicit term.
class GradientFlowStepper {
public:
    GradientFlowStepper(Equation eq, const UniformGrid& grid, SolverConfig config, Potential potential,
                        std::optional<Kernel> kernel = std::nullopt)
        : eq_(eq), config_(config), potential_(std::move(potential)), basis_(grid)
    {
        if (!(config.tau > 0.0) || !(config.final_time > 0.0) || !(config.mobility > 0.0))
            throw std::invalid_argument("tau, final time and mobility must be positive");
        if (config.tau > config.final_time) throw std::invalid_argument("tau exceeds final time");
        if (config.record_every == 0) throw std::invalid_argument("record_every must be positive");
        if (config.scheme == Scheme::SemiImplicitStabilized && config.stabilization < potential_.alpha())
            throw std::invalid_argument("stabilization S must be >= alpha of the potential");
        if (is_nonlocal(eq)) {
            if (!kernel) throw std::invalid_argument("nonlocal equation needs a kernel");
            op_.emplace(*kernel, grid);
        }
        const double limit = stability_limit();
        if (config.tau > limit) {
            std::ostringstream os;
            os << "tau = " << config.tau << " exceeds the stability limit " << limit;
            if (!config.allow_unstable) throw std::invalid_argument(os.str());
            warning_handler()(os.str());
        }
    }

    const SpectralBasis& basis() const { return basis_; }
    const SolverConfig& config() const { return config_; }
    const Potential& potential() const { return potential_; }
    const NonlocalOperator* nonlocal() const { return op_ ? &*op_ : nullptr; }

    /// Largest admissible time step; infinite for the unconditionally stable variants.
    double stability_limit() const
    {
        const double lmax = basis_.max_eigenvalue();
        const double rate = rate_factor(lmax);
        if (config_.scheme == Scheme::FullyExplicit) {
            const double opmax = op_ ? 2.0 * op_->max_degree() : lmax;
            return 0.5 / (rate * (opmax + potential_.alpha()));
        }
        if (op_ && !config_.local_preconditioner) return 0.5 / (rate * op_->max_degree());
        return std::numeric_limits<double>::infinity();
    }

    Field step(const Field& c) const
    {
        const double tau = config_.tau;
        const double S = config_.scheme == Scheme::SemiImplicitStabilized ? config_.stabilization : 0.0;
        const bool implicit_laplacian =
            config_.scheme == Scheme::SemiImplicitStabilized && (!op_ || config_.local_preconditioner);

        // Explicit part r(c) in physical space (the -Delta c contribution of the
        // explicit schemes is added in spectral space below).
        Field r = potential_.fprime(c);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= S * c[i];
        if (op_) r += op_->apply(c);

        Spectrum chat = basis_.forward(c);
        const Spectrum rhat = basis_.forward(r);
        // With an implicit local Laplacian the nonlocal explicit term becomes
        // L_eps c + Delta c, i.e. subtract lambda c_k; a local explicit scheme adds it.
        const double explicit_lambda = implicit_laplacian ? (op_ ? -1.0 : 0.0) : (op_ ? 0.0 : 1.0);
        const double implicit_lambda = implicit_laplacian ? 1.0 : 0.0;
        basis_.combine(chat, rhat, [&](double lambda, auto ck, auto rk) {
            const double g = rate_factor(lambda);
            const auto explicit_term = rk + explicit_lambda * lambda * ck;
            return (ck - tau * g * explicit_term) / (1.0 + tau * g * (implicit_lambda * lambda + S));
        });
        return basis_.inverse(chat);
    }

    /// E^CH for local runs, E^NL_eps for nonlocal runs.
    double energy(const Field& c) const
    {
        const double interface = op_ ? op_->energy(c) : dirichlet_energy(basis_, c);
        return interface + potential_.bulk_energy(c);
    }

private:
    double rate_factor(double lambda) const
    {
        return conserves_mass(eq_) ? config_.mobility * lambda : 1.0;
    }

    Equation eq_;
    SolverConfig config_;
    Potential potential_;
    SpectralBasis basis_;
    std::optional<NonlocalOperator> op_;
};

namespace detail {

inline void check_divergence(const Field& next, double reference, std::size_t step, double t)
{
    const double limit = kDivergenceGrowth * std::max(1.0, reference);
    if (!next.all_finite() || linf_norm(next) > limit) {
        std::ostringstream os;
        os << "solver diverged at step " << step << " (t = " << t << "): max |c| = " << linf_norm(next)
           << " exceeds " << limit;
        throw DivergenceError(os.str());
    }
}

inline Field single_step(Equation eq, const Field& state, const SolverConfig& config, const Potential& potential,
                         std::optional<Kernel> kernel)
{
    SolverConfig cfg = config;
    cfg.final_time = std::max(cfg.final_time, cfg.tau);
    GradientFlowStepper stepper(eq, state.grid(), cfg, potential, kernel);
    Field next = stepper.step(state);
    check_divergence(next, linf_norm(state), 1, cfg.tau);
    return next;
}

} // namespace detail

inline Field step_local_ch(const Field& state, const SolverConfig& config, const Potential& potential)
{
    return detail::single_step(Equation::LocalCH, state, config, potential, std::nullopt);
}

inline Field step_nonlocal_ch(const Field& state, const SolverConfig& config, const Potential& potential,
                              const Kernel& kernel)
{
    return detail::single_step(Equation::NonlocalCH, state, config, potential, kernel);
}

inline Field step_local_ac(const Field& state, const SolverConfig& config, const Potential& potential)
{
    return detail::single_step(Equation::LocalAC, state, config, potential, std::nullopt);
}

inline Field step_nonlocal_ac(const Field& state, const SolverConfig& config, const Potential& potential,
                              const Kernel& kernel)
{
    return detail::single_step(Equation::NonlocalAC, state, config, potential, kernel);
}

/// Number of steps to reach final_time; final_time must be a multiple of tau.
inline std::size_t step_count(const SolverConfig& config)
{
    const double ratio = config.final_time / config.tau;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-6 * std::max(1.0, ratio))
        throw std::invalid_argument("final time must be an integer multiple of tau");
    return static_cast<std::size_t>(n);
}

/// Integrates to final_time, recording time, mass and energy at step 0, every
/// record_every steps, and at the final step. `observer` sees every recorded state.
inline TrajectoryRecord run(Equation eq, const Field& initial, const SolverConfig& config, const Potential& potential,
                            std::optional<Kernel> kernel = std::nullopt,
                            const std::function<void(std::size_t, double, const Field&)>& observer = {})
{
    GradientFlowStepper stepper(eq, initial.grid(), config, potential, kernel);
    const std::size_t steps = step_count(config);
    const double reference = linf_norm(initial);
    TrajectoryRecord rec;
    auto record = [&](std::size_t n, const Field& c) {
        rec.times.push_back(static_cast<double>(n) * config.tau);
        rec.mass.push_back(integrate(c));
        rec.energy.push_back(stepper.energy(c));
        if (config.keep_fields) rec.fields.push_back(c);
        if (observer) observer(n, rec.times.back(), c);
    };
    Field c = initial;
    record(0, c);
    for (std::size_t n = 1; n <= steps; ++n) {
        c = stepper.step(c);
        detail::check_divergence(c, reference, n, static_cast<double>(n) * config.tau);
        if (n % config.record_every == 0 || n == steps) record(n, c);
    }
    return rec;
}

} // namespace nlch

#endif // NLCH_SOLVERS_HPP_
