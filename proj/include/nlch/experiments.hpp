#ifndef NLCH_EXPERIMENTS_HPP_
#define NLCH_EXPERIMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/local_op.hpp"
#include "nlch/nonlocal_op.hpp"
#include "nlch/norms.hpp"
#include "nlch/parallel.hpp"
#include "nlch/potentials.hpp"
#include "nlch/rate.hpp"
#include "nlch/solvers.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

/// Relative tolerance of the direct-vs-FFT oracle equivalence; fit floors sit 10x above it.
inline constexpr double kOracleTolerance = 1e-10;

/// Studies refuse eps R < 8 h.
inline void require_resolvable(const MollifierSpec& m, const UniformGrid& g, const std::vector<double>& eps)
{
    for (double e : eps)
        if (e * m.support_radius < 8.0 * g.max_spacing())
            throw std::invalid_argument("eps = " + std::to_string(e) + " is not resolved by the grid (need eps R >= 8 h)");
}

/// e(eps) = ||L_eps c + Delta c||_{L2(Omega)}.
inline RateTable operator_rate_study(const Field& c, const MollifierSpec& m, const std::vector<double>& eps,
                                     std::size_t threads = 1)
{
    require_resolvable(m, c.grid(), eps);
    const SpectralBasis basis(c.grid());
    const Field lap = laplacian(basis, c);
    const double scale = l2_norm(lap);
    auto errors = parallel_map(eps.size(), threads, [&](std::size_t i) {
        const NonlocalOperator op(Kernel(m, eps[i]), c.grid());
        return l2_norm(op.apply(c) + lap);
    });
    return fit_rate(eps, std::move(errors), 10.0 * kOracleTolerance * scale);
}

struct EnergyStudy {
    RateTable table;
    std::vector<double> energies;
    double target = 0.0; ///< (1/2) integral of |grad c|^2
    bool monotone = false;
};

/// e(eps) = |E_eps(c) - (1/2) integral |grad c|^2|; requires strictly decreasing errors.
inline EnergyStudy energy_rate_study(const Field& c, const MollifierSpec& m, const std::vector<double>& eps,
                                     std::size_t threads = 1)
{
    require_resolvable(m, c.grid(), eps);
    EnergyStudy s;
    s.target = dirichlet_energy(c);
    s.energies = parallel_map(eps.size(), threads, [&](std::size_t i) {
        return NonlocalOperator(Kernel(m, eps[i]), c.grid()).energy(c);
    });
    std::vector<double> errors;
    for (double e : s.energies) errors.push_back(std::abs(e - s.target));
    const double floor = 10.0 * kOracleTolerance * std::max(s.target, 1e-300);
    s.table = fit_rate(eps, errors, s.target > 0.0 ? floor : 1e-300);
    s.monotone = !s.table.exact && strictly_decreasing(s.table.errors);
    return s;
}

struct RemainderStudy {
    std::vector<double> epsilons;
    std::vector<double> near_margin; ///< margin = eps R / 2
    std::vector<double> far_margin;  ///< margin just above eps R; zero by compact support
    bool decreasing = false;
    bool far_exactly_zero = false;
};

inline RemainderStudy remainder_study(const Field& c, const MollifierSpec& m, const std::vector<double>& eps)
{
    require_resolvable(m, c.grid(), eps);
    RemainderStudy s;
    s.epsilons = eps;
    for (double e : eps) {
        const Kernel k(m, e);
        s.near_margin.push_back(interior_remainder(k, c, 0.5 * k.support()));
        s.far_margin.push_back(interior_remainder(k, c, k.support() * (1.0 + 1e-9)));
    }
    s.decreasing = strictly_decreasing(s.near_margin);
    s.far_exactly_zero = std::all_of(s.far_margin.begin(), s.far_margin.end(), [](double v) { return v == 0.0; });
    return s;
}

/// Frequencies {+-1, ..., +-lattice_max}^n (zero excluded).
inline std::vector<std::vector<double>> symbol_lattice(int n, int lattice_max)
{
    std::vector<double> axis;
    for (int v = -lattice_max; v <= lattice_max; ++v)
        if (v != 0) axis.push_back(v);
    std::vector<std::vector<double>> out;
    if (n == 1) {
        for (double a : axis) out.push_back({a});
    } else {
        for (double a : axis)
            for (double b : axis) out.push_back({a, b});
    }
    return out;
}

/// e(eps) = max over the lattice of |sigma_eps(xi) - |xi|^2| / |xi|^3.
inline RateTable symbol_study(const MollifierSpec& m, const std::vector<double>& eps, int lattice_max = 8,
                              std::size_t threads = 1)
{
    const auto lattice = symbol_lattice(m.dimension, lattice_max);
    auto errors = parallel_map(eps.size(), threads, [&](std::size_t i) {
        const Kernel k(m, eps[i]);
        double worst = 0.0;
        for (const auto& xi : lattice) {
            double n2 = 0.0;
            for (double v : xi) n2 += v * v;
            const double err = std::abs(fourier_symbol(k, xi) - n2) / std::pow(n2, 1.5);
            worst = std::max(worst, err);
        }
        return worst;
    });
    return fit_rate(eps, std::move(errors));
}

/// The quantities of the relative-entropy estimate at one recorded time:
///   d/dt (1/2)||u||_{H-1}^2 + (1/2)||u||_{L2}^2 + (1/2) E_eps(u)  <=  C (||u||_{H-1}^2 + ||L_eps c + Delta c||_{L2}^2)
struct GronwallRow {
    double time = 0.0;
    double ddt_half_hm1_sq = 0.0;
    double half_l2_sq = 0.0;
    double half_energy = 0.0;
    double hm1_sq = 0.0;
    double consistency_sq = 0.0;

    double lhs() const { return ddt_half_hm1_sq + half_l2_sq + half_energy; }
    double rhs_unit() const { return hm1_sq + consistency_sq; }
};

struct GronwallTrace {
    std::vector<GronwallRow> rows;
    double constant = 0.0; ///< smallest C for which every row satisfies the inequality
    bool holds = false;
};

/// Builds the trace from synchronised nonlocal (c_eps) and local (c) snapshots.
/// E_eps(u) is evaluated as (1/2) <L_eps u, u>, the identity checked by the factor audit.
inline GronwallTrace gronwall_trace(const std::vector<double>& times, const std::vector<Field>& nonlocal,
                                    const std::vector<double>& local_times, const std::vector<Field>& local,
                                    const NonlocalOperator& op)
{
    if (times.size() != local_times.size() || nonlocal.size() != times.size() || local.size() != times.size())
        throw std::invalid_argument("time grids mismatch");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - local_times[i]) > 1e-9 * std::max(1.0, std::abs(times[i])))
            throw std::invalid_argument("time grids mismatch");
    const SpectralBasis basis(op.grid());
    GronwallTrace tr;
    std::vector<double> half_hm1(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Field u = nonlocal[i] - local[i];
        GronwallRow row;
        row.time = times[i];
        const double hm1 = hminus1_norm(basis, u);
        row.hm1_sq = hm1 * hm1;
        half_hm1[i] = 0.5 * row.hm1_sq;
        row.half_l2_sq = 0.5 * inner(u, u);
        row.half_energy = 0.5 * op.energy(u);
        const Field consistency = op.apply(local[i]) + laplacian(basis, local[i]);
        row.consistency_sq = inner(consistency, consistency);
        tr.rows.push_back(row);
    }
    const std::size_t n = times.size();
    for (std::size_t i = 0; i < n && n > 1; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? i : i + 1;
        tr.rows[i].ddt_half_hm1_sq = (half_hm1[b] - half_hm1[a]) / (times[b] - times[a]);
    }
    tr.constant = 0.0;
    for (const auto& r : tr.rows)
        if (r.rhs_unit() > 0.0) tr.constant = std::max(tr.constant, r.lhs() / r.rhs_unit());
    tr.holds = std::isfinite(tr.constant);
    for (const auto& r : tr.rows)
        if (r.lhs() > tr.constant * r.rhs_unit() * (1.0 + 1e-12) + 1e-300) tr.holds = false;
    return tr;
}

enum class FlowKind { CahnHilliard, AllenCahn };

struct SolutionStudyConfig {
    FlowKind flow = FlowKind::CahnHilliard;
    SolverConfig solver;                 ///< configuration of the nonlocal runs
    std::size_t reference_refinement = 10; ///< local reference uses tau / refinement
    std::vector<double> epsilons;
    std::size_t threads = 1;
};

/// Error time series of one nonlocal run against the local reference.
struct ErrorSeries {
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> hminus1;
    std::vector<double> l2;
    std::vector<double> h_minus_half;
    std::vector<double> l4;
    GronwallTrace gronwall;
    double energy_time_integral = 0.0; ///< integral over (0, T) of E_eps(u)
};

struct SolutionStudy {
    RateTable sup_hminus1;        ///< L-infinity(0,T; H^-1)
    RateTable spacetime_l2;       ///< L2(Omega_T)
    RateTable sup_l2;             ///< L-infinity(0,T; L2)
    RateTable sup_h_minus_half;   ///< L-infinity(0,T; H^-1/2)
    RateTable spacetime_l4;       ///< L2(0,T; L4)
    RateTable energy_integral;    ///< integral of E_eps(u) dt
    std::vector<ErrorSeries> series;
    double reference_h3_sup = 0.0;  ///< max over recorded times of ||c||_{H3}
    double reference_h3_l2 = 0.0;   ///< ||c||_{L2(0,T;H3)}
    double reference_scale = 0.0;   ///< max over recorded times of ||c - mean||_{L2}
};

namespace detail {

/// Trapezoid rule over recorded times.
inline double time_integral(const std::vector<double>& t, const std::vector<double>& v)
{
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
    return s;
}

inline double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

} // namespace detail

/// Runs the local reference once (tau / refinement) and one nonlocal run per
/// eps from the same initial data, then fits rates for every error norm.
inline SolutionStudy solution_convergence_study(const Field& initial, const Potential& potential,
                                                const MollifierSpec& m, const SolutionStudyConfig& cfg)
{
    require_resolvable(m, initial.grid(), cfg.epsilons);
    const bool ch = cfg.flow == FlowKind::CahnHilliard;
    const Equation local_eq = ch ? Equation::LocalCH : Equation::LocalAC;
    const Equation nonlocal_eq = ch ? Equation::NonlocalCH : Equation::NonlocalAC;

    SolverConfig ref_cfg = cfg.solver;
    ref_cfg.tau = cfg.solver.tau / static_cast<double>(cfg.reference_refinement);
    ref_cfg.record_every = cfg.solver.record_every * cfg.reference_refinement;
    ref_cfg.keep_fields = true;
    const TrajectoryRecord reference = run(local_eq, initial, ref_cfg, potential);

    const SpectralBasis basis(initial.grid());
    SolutionStudy study;
    {
        std::vector<double> h3sq;
        for (const Field& c : reference.fields) {
            const double h3 = sobolev_norm(basis, c, 3.0);
            study.reference_h3_sup = std::max(study.reference_h3_sup, h3);
            h3sq.push_back(h3 * h3);
            Field fl = c;
            const double mu = mean(c);
            for (double& v : fl.values()) v -= mu;
            study.reference_scale = std::max(study.reference_scale, l2_norm(fl));
        }
        study.reference_h3_l2 = std::sqrt(detail::time_integral(reference.times, h3sq));
    }

    study.series = parallel_map(cfg.epsilons.size(), cfg.threads, [&](std::size_t i) {
        const Kernel k(m, cfg.epsilons[i]);
        SolverConfig c = cfg.solver;
        c.keep_fields = true;
        const TrajectoryRecord traj = run(nonlocal_eq, initial, c, potential, k);
        ErrorSeries s;
        s.epsilon = cfg.epsilons[i];
        s.times = traj.times;
        if (traj.times.size() != reference.times.size())
            throw std::runtime_error("time grids mismatch between nonlocal run and reference");
        const NonlocalOperator op(k, initial.grid());
        std::vector<double> energy_u;
        for (std::size_t j = 0; j < traj.fields.size(); ++j) {
            const Field u = traj.fields[j] - reference.fields[j];
            s.hminus1.push_back(hminus1_norm(basis, u));
            s.l2.push_back(l2_norm(u));
            s.h_minus_half.push_back(sobolev_norm(basis, u, -0.5));
            s.l4.push_back(lp_norm(u, 4.0));
            energy_u.push_back(op.energy(u));
        }
        s.energy_time_integral = detail::time_integral(s.times, energy_u);
        if (ch) s.gronwall = gronwall_trace(traj.times, traj.fields, reference.times, reference.fields, op);
        return s;
    });

    std::vector<double> e_hm1, e_l2st, e_l2sup, e_hhalf, e_l4, e_energy;
    for (const auto& s : study.series) {
        e_hm1.push_back(detail::max_of(s.hminus1));
        std::vector<double> sq;
        for (double v : s.l2) sq.push_back(v * v);
        e_l2st.push_back(std::sqrt(detail::time_integral(s.times, sq)));
        e_l2sup.push_back(detail::max_of(s.l2));
        e_hhalf.push_back(detail::max_of(s.h_minus_half));
        std::vector<double> sq4;
        for (double v : s.l4) sq4.push_back(v * v);
        e_l4.push_back(std::sqrt(detail::time_integral(s.times, sq4)));
        e_energy.push_back(s.energy_time_integral);
    }
    study.sup_hminus1 = fit_rate(cfg.epsilons, e_hm1);
    study.spacetime_l2 = fit_rate(cfg.epsilons, e_l2st);
    study.sup_l2 = fit_rate(cfg.epsilons, e_l2sup);
    study.sup_h_minus_half = fit_rate(cfg.epsilons, e_hhalf);
    study.spacetime_l4 = fit_rate(cfg.epsilons, e_l4);
    study.energy_integral = fit_rate(cfg.epsilons, e_energy);
    return study;
}

} // namespace nlch

#endif // NLCH_EXPERIMENTS_HPP_
