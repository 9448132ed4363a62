#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nlch/experiments.hpp"
#include "nlch/test_functions.hpp"

using namespace nlch;

namespace {

const MollifierSpec m1 = make_mollifier(1, Profile::Poly2_3);
const MollifierSpec m2 = make_mollifier(2, Profile::Poly2_3);

std::vector<double> powers(const std::vector<double>& eps, double a, double p)
{
    std::vector<double> out;
    for (double e : eps) out.push_back(a * std::pow(e, p));
    return out;
}

const std::vector<double> ladder = {0.2, 0.1, 0.05, 0.025};

} // namespace

TEST(FitRate, ExactPowerLaws)
{
    const RateTable lin = fit_rate(ladder, powers(ladder, 1.0, 1.0));
    EXPECT_NEAR(lin.slope, 1.0, 1e-12);
    EXPECT_NEAR(lin.intercept, 0.0, 1e-12);
    EXPECT_NEAR(lin.r_squared, 1.0, 1e-12);
    EXPECT_EQ(lin.fitted_points(), 4u);
    EXPECT_FALSE(lin.exact);
    EXPECT_NEAR(fit_rate(ladder, powers(ladder, 2.0, 0.5)).slope, 0.5, 1e-12);
    EXPECT_NEAR(fit_rate(ladder, powers(ladder, 2.0, 0.5)).intercept, std::log(2.0), 1e-12);
}

TEST(FitRate, RecoversSlopeUnderNoise)
{
    std::vector<double> eps;
    for (int i = 0; i < 8; ++i) eps.push_back(0.4 * std::pow(0.5, i));
    std::mt19937_64 gen(123);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> err = powers(eps, 3.0, 0.7);
    for (double& e : err) e *= 1.0 + noise(gen);
    EXPECT_NEAR(fit_rate(eps, err).slope, 0.7, 0.05);
}

TEST(FitRate, FloorExcludesPointsButKeepsThem)
{
    const RateTable t = fit_rate(ladder, {1e-2, 5e-3, 1e-20, 0.0}, 1e-15);
    EXPECT_EQ(t.errors.size(), 4u);
    EXPECT_EQ(t.included, (std::vector<bool>{true, true, false, false}));
    EXPECT_NEAR(t.slope, 1.0, 1e-12);
    const RateTable all = fit_rate(ladder, {0.0, 0.0, 0.0, 0.0});
    EXPECT_TRUE(all.exact);
    EXPECT_TRUE(std::isnan(all.slope));
    const RateTable one = fit_rate(ladder, {1.0, 0.0, 0.0, 0.0});
    EXPECT_FALSE(one.exact);
    EXPECT_TRUE(std::isnan(one.slope));
}

TEST(FitRate, RejectsBadInput)
{
    EXPECT_THROW(fit_rate({0.2, 0.1}, {1.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(fit_rate({0.1, 0.2, 0.05}, {1.0, 2.0, 3.0}), std::invalid_argument);
    EXPECT_THROW(fit_rate({0.2, 0.1, 0.1}, {1.0, 2.0, 3.0}), std::invalid_argument);
    EXPECT_THROW(fit_rate(ladder, {1.0, -1.0, 0.5, 0.2}), std::invalid_argument);
    EXPECT_THROW(fit_rate(ladder, {1.0, NAN, 0.5, 0.2}), std::invalid_argument);
    EXPECT_THROW(fit_rate(ladder, {1.0, 0.5, 0.2}), std::invalid_argument);
}

TEST(SymbolLattice, ExcludesZero)
{
    EXPECT_EQ(symbol_lattice(1, 8).size(), 16u);
    EXPECT_EQ(symbol_lattice(2, 8).size(), 256u);
    for (const auto& xi : symbol_lattice(1, 3)) EXPECT_NE(xi[0], 0.0);
}

TEST(Studies, SymbolRateIsAtLeastLinear)
{
    for (const auto* m : {&m1, &m2}) {
        const RateTable t = symbol_study(*m, ladder);
        EXPECT_GE(t.slope, 0.9) << m->dimension;
        EXPECT_TRUE(strictly_decreasing(t.errors));
    }
}

TEST(Studies, OperatorRatePeriodicSmoothField)
{
    const Field c = sample_named(UniformGrid::line(1.0, 2048, Boundary::Periodic), "sinmix");
    const RateTable t = operator_rate_study(c, m1, ladder);
    EXPECT_GE(t.slope, 0.9);
    EXPECT_EQ(t.fitted_points(), 4u);
}

TEST(Studies, OperatorRateNeumannBoundaryLayer)
{
    // cos(pi x) has zero normal derivative but nonzero third derivative at the
    // faces; the boundary layer limits the global L2 rate to about 1/2.
    const Field c = sample_named(UniformGrid::line(1.0, 2048, Boundary::Neumann), "cospix");
    const RateTable t = operator_rate_study(c, m1, ladder);
    EXPECT_GE(t.slope, 0.4);
    EXPECT_LE(t.slope, 0.7);
}

TEST(Studies, ConstantFieldGivesExactTables)
{
    const Field c(UniformGrid::line(1.0, 512, Boundary::Neumann), 0.5);
    EXPECT_TRUE(operator_rate_study(c, m1, ladder).exact);
    const EnergyStudy e = energy_rate_study(c, m1, ladder);
    EXPECT_TRUE(e.table.exact);
    EXPECT_FALSE(e.monotone);
    for (double v : e.energies) EXPECT_EQ(v, 0.0);
}

TEST(Studies, EnergyConvergesMonotonically)
{
    const Field c = sample_named(UniformGrid::line(1.0, 2048, Boundary::Neumann), "cospix");
    const EnergyStudy e = energy_rate_study(c, m1, ladder);
    EXPECT_TRUE(e.monotone);
    EXPECT_NEAR(e.target, std::numbers::pi * std::numbers::pi / 4.0, 1e-9);
    for (double v : e.energies) {
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, e.target);
    }
}

TEST(Studies, RemainderStudy)
{
    const Field c = sample_named(UniformGrid::line(1.0, 2048, Boundary::Neumann), "cospix");
    const RemainderStudy r = remainder_study(c, m1, ladder);
    EXPECT_TRUE(r.decreasing);
    EXPECT_TRUE(r.far_exactly_zero);
}

TEST(Studies, RejectUnresolvedEpsilon)
{
    const Field c = sample_named(UniformGrid::line(1.0, 64, Boundary::Neumann), "cospix");
    EXPECT_THROW(operator_rate_study(c, m1, ladder), std::invalid_argument);
    EXPECT_THROW(energy_rate_study(c, m1, ladder), std::invalid_argument);
}

TEST(Studies, ThreadCountDoesNotChangeResults)
{
    const Field c = sample_named(UniformGrid::line(1.0, 1024, Boundary::Periodic), "sinmix");
    const RateTable a = operator_rate_study(c, m1, {0.2, 0.1, 0.05}, 1);
    const RateTable b = operator_rate_study(c, m1, {0.2, 0.1, 0.05}, 3);
    EXPECT_EQ(a.errors, b.errors);
    EXPECT_EQ(a.slope, b.slope);
    EXPECT_EQ(symbol_study(m2, ladder, 8, 1).errors, symbol_study(m2, ladder, 8, 4).errors);
}

TEST(Gronwall, IdenticalStatesGiveZeroLeftSide)
{
    const auto g = UniformGrid::line(1.0, 256, Boundary::Neumann);
    const Field c = sample_named(g, "cospix");
    const NonlocalOperator op(Kernel(m1, 0.1), g);
    const std::vector<double> t = {0.0, 0.1, 0.2};
    const std::vector<Field> f = {c, c, c};
    const GronwallTrace tr = gronwall_trace(t, f, t, f, op);
    EXPECT_TRUE(tr.holds);
    EXPECT_EQ(tr.constant, 0.0);
    for (const auto& r : tr.rows) {
        EXPECT_EQ(r.lhs(), 0.0);
        EXPECT_GT(r.consistency_sq, 0.0);
    }
}

TEST(Gronwall, RejectsMismatchedTimes)
{
    const auto g = UniformGrid::line(1.0, 64, Boundary::Neumann);
    const Field c(g, 0.0);
    const NonlocalOperator op(Kernel(m1, 0.2), g);
    EXPECT_THROW(gronwall_trace({0.0, 0.1}, {c, c}, {0.0, 0.2}, {c, c}, op), std::invalid_argument);
    EXPECT_THROW(gronwall_trace({0.0, 0.1}, {c}, {0.0, 0.1}, {c, c}, op), std::invalid_argument);
}

TEST(SolutionStudy, SmallCahnHilliardRun)
{
    const Field c0 = sample_named(UniformGrid::line(1.0, 256, Boundary::Neumann), "ch-initial");
    SolutionStudyConfig cfg;
    cfg.solver.tau = 1e-5;
    cfg.solver.final_time = 5e-3;
    cfg.solver.record_every = 100;
    cfg.reference_refinement = 2;
    cfg.epsilons = {0.2, 0.1, 0.05};
    const SolutionStudy st = solution_convergence_study(c0, Potential(DoubleWell{1.0}), m1, cfg);
    ASSERT_EQ(st.series.size(), 3u);
    EXPECT_EQ(st.series[0].times.size(), 6u);
    EXPECT_TRUE(strictly_decreasing(st.sup_hminus1.errors));
    EXPECT_GT(st.sup_hminus1.slope, 0.0);
    for (const auto& s : st.series) {
        EXPECT_EQ(s.hminus1.front(), 0.0);
        EXPECT_TRUE(s.gronwall.holds);
        EXPECT_TRUE(std::isfinite(s.gronwall.constant));
    }
    EXPECT_GT(st.reference_h3_sup, 0.0);
}

TEST(SolutionStudy, LargeEpsilonErrorIsOrderOne)
{
    // With the kernel far wider than the domain, the nonlocal flow barely moves
    // and the error is comparable to the evolution of the local solution.
    const Field c0 = sample_named(UniformGrid::line(1.0, 128, Boundary::Neumann), "ch-initial");
    SolutionStudyConfig cfg;
    cfg.solver.tau = 1e-5;
    cfg.solver.final_time = 1e-2;
    cfg.solver.record_every = 200;
    cfg.reference_refinement = 1;
    cfg.epsilons = {40.0, 20.0, 10.0};
    const SolutionStudy st = solution_convergence_study(c0, Potential(DoubleWell{1.0}), m1, cfg);
    for (double e : st.sup_l2.errors) {
        EXPECT_GE(e / st.reference_scale, 0.1);
        EXPECT_LE(e / st.reference_scale, 10.0);
    }
}
