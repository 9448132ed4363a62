// Batch front end: one study or solver run per invocation.
// Exit codes: 0 pass, 1 acceptance-band failure, 2 usage/config error.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlch/nlch.hpp"

namespace {

using namespace nlch;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kPass = 0;
constexpr int kBandFail = 1;
constexpr int kUsage = 2;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config;
    std::string out = "nlch-out";
    std::size_t threads = default_threads();
};

struct KernelOpts {
    int n = 1;
    std::string profile = "poly-2-3";
};

struct GridOpts {
    std::string domain = "neumann";
    std::size_t N = 4096;
    double L = 1.0;
};

const std::vector<double> kRateLadder = {0.2, 0.1, 0.05, 0.025};
const std::vector<double> kSolutionLadder = {0.16, 0.08, 0.04, 0.02};

void add_common(CLI::App* s, Common& c)
{
    s->add_option("--config", c.config, "flat key=value config file; flags take precedence");
    s->add_option("--out", c.out, "output directory")->capture_default_str();
    s->add_option("--threads", c.threads, "worker threads for independent eps runs")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void add_kernel(CLI::App* s, KernelOpts& k)
{
    s->add_option("--n", k.n, "space dimension (1 or 2)")->capture_default_str()->check(CLI::IsMember({1, 2}));
    s->add_option("--profile", k.profile, "mollifier profile")
        ->capture_default_str()
        ->check(CLI::IsMember({"poly-2-3", "poly-2-4"}));
}

void add_grid(CLI::App* s, GridOpts& g)
{
    s->add_option("--domain", g.domain, "neumann (bounded box) or periodic")
        ->capture_default_str()
        ->check(CLI::IsMember({"neumann", "periodic"}));
    s->add_option("--N", g.N, "cells per axis")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--L", g.L, "box side length")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_eps_list(CLI::App* s, std::vector<double>& eps)
{
    s->add_option("--eps", eps, "comma-separated, strictly decreasing")->delimiter(',')->capture_default_str();
}

void add_band(CLI::App* s, Band& b)
{
    s->add_option("--band-lo", b.lo, "lower end of the slope acceptance band");
    s->add_option("--band-hi", b.hi, "upper end of the slope acceptance band");
}

/// Flat key=value file; keys are option names without dashes. Only options the
/// command line left unset are filled.
void apply_config(CLI::App* sub, const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read config file '" + path + "'");
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(is);
    } catch (const CLI::Error& e) {
        throw UsageError("malformed config file '" + path + "': " + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub->get_name()))
            throw UsageError("config key '" + item.fullname() + "' does not belong to '" + sub->get_name() + "'");
        if (item.name == "config") continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
        if (opt == nullptr) throw UsageError("unknown config key '" + item.name + "'");
        if (opt->count() > 0) continue;
        opt->add_result(item.inputs);
        opt->run_callback();
    }
}

fs::path prepare_output(const Common& c, CLI::App* sub)
{
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory '" + c.out + "'");
    std::ofstream os(dir / (sub->get_name() + ".cfg"));
    if (!os) throw UsageError("output directory '" + c.out + "' is not writable");
    std::istringstream resolved(sub->config_to_str(true, false));
    std::string line;
    while (std::getline(resolved, line)) {
        // Unset options without a default carry no information.
        const bool unset = line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0;
        if (line.rfind("config=", 0) != 0 && !unset) os << line << '\n';
    }
    return dir;
}

UniformGrid make_grid(int n, const GridOpts& g)
{
    const Boundary b = parse_boundary(g.domain);
    return n == 1 ? UniformGrid::line(g.L, g.N, b) : UniformGrid::square(g.L, g.N, b);
}

void check_ladder(const std::vector<double>& eps)
{
    if (eps.size() < 3) throw UsageError("--eps needs at least 3 values");
    if (!strictly_decreasing(eps) || !(eps.back() > 0.0))
        throw UsageError("--eps must be positive and strictly decreasing");
}

void print_table(const std::string& name, const RateTable& t, const Band& band)
{
    std::cout << name << '\n';
    for (std::size_t i = 0; i < t.epsilons.size(); ++i)
        std::cout << "  eps=" << t.epsilons[i] << "  error=" << t.errors[i] << (t.included[i] ? "" : "  (excluded)")
                  << '\n';
    std::cout << "  slope=" << t.slope << "  r2=" << t.r_squared << "  band=[" << band.lo << ", " << band.hi
              << "]  verdict=" << verdict(t, band) << '\n';
}

/// CSV, JSON and SVG for one rate table; returns whether it passed.
bool emit_table(const fs::path& dir, const std::string& stem, const RateTable& t, const Band& band,
                double reference_slope, json extra = json::object())
{
    write_rate_csv(dir / (stem + ".csv"), t);
    json j = rate_summary(t, band);
    for (auto& [k, v] : extra.items()) j[k] = v;
    write_json(dir / (stem + ".json"), j);
    write_rate_svg(dir / (stem + ".svg"), t, stem, reference_slope);
    print_table(stem, t, band);
    return verdict(t, band) != "fail";
}

Band band_or(const Band& given, double lo, double hi)
{
    Band b = given;
    if (std::isinf(b.lo) && b.lo < 0) b.lo = lo;
    if (std::isinf(b.hi) && b.hi > 0) b.hi = hi;
    return b;
}

// ---------------------------------------------------------------- commands

int check_kernel(const fs::path& dir, const KernelOpts& ko, double eps)
{
    const MollifierSpec m = make_mollifier(ko.n, ko.profile);
    const Kernel k(m, eps);
    const double target = normalization_target(ko.n);
    const double mass = radial_mass(m);
    const double norm_err = std::abs(mass - target) / target;
    json j;
    j["dimension"] = ko.n;
    j["profile"] = ko.profile;
    j["epsilon"] = eps;
    j["norm_constant"] = m.norm_constant;
    j["radial_mass"] = mass;
    j["radial_mass_target"] = target;
    j["normalization_rel_error"] = norm_err;
    j["total_mass"] = total_mass(k);
    j["value_at_origin"] = k.radial(0.0);
    bool ok = norm_err <= 1e-10;
    std::cout << "normalization: " << mass << " (target " << target << ", rel error " << norm_err << ")\n";
    for (int a = 0; a < ko.n; ++a) {
        const double m1 = moment_first(k, a);
        const double m2 = moment_second(k, a);
        j["first_moment"].push_back(m1);
        j["second_moment"].push_back(m2);
        std::cout << "axis " << a << ": first moment " << m1 << ", second moment " << m2 << '\n';
        ok = ok && std::abs(m1) <= 1e-10 && std::abs(m2 - 2.0) <= 1e-8;
    }
    j["second_moment_trace_half"] = moment_second_trace(k);
    j["verdict"] = ok ? "pass" : "fail";
    write_json(dir / "check-kernel.json", j);
    std::cout << "verdict: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kPass : kBandFail;
}

int symbol_rate(const fs::path& dir, const KernelOpts& ko, const std::vector<double>& eps, int lattice,
                const Band& given, std::size_t threads)
{
    check_ladder(eps);
    const auto t = symbol_study(make_mollifier(ko.n, ko.profile), eps, lattice, threads);
    const Band band = band_or(given, 0.9, kInf);
    return emit_table(dir, "symbol-rate", t, band, 1.0, {{"lattice_max", lattice}}) ? kPass : kBandFail;
}

int operator_rate(const fs::path& dir, const KernelOpts& ko, const GridOpts& go, const std::string& func,
                  const std::vector<double>& eps, const Band& given, std::size_t threads)
{
    check_ladder(eps);
    const UniformGrid grid = make_grid(ko.n, go);
    const Field c = sample_named(grid, func);
    const auto t = operator_rate_study(c, make_mollifier(ko.n, ko.profile), eps, threads);
    Band band;
    double ref = 1.0;
    if (grid.boundary() == Boundary::Periodic) {
        band = band_or(given, 0.9, kInf);
    } else if (func == "windowed-cos") {
        band = band_or(given, 0.85, kInf);
    } else {
        band = band_or(given, 0.4, 0.7);
        ref = 0.5;
    }
    return emit_table(dir, "operator-rate", t, band, ref, {{"function", func}, {"domain", go.domain}}) ? kPass
                                                                                                        : kBandFail;
}

int energy_rate(const fs::path& dir, const KernelOpts& ko, const GridOpts& go, const std::string& func,
                const std::vector<double>& eps, std::size_t threads)
{
    check_ladder(eps);
    const UniformGrid grid = make_grid(ko.n, go);
    const auto s = energy_rate_study(sample_named(grid, func), make_mollifier(ko.n, ko.profile), eps, threads);
    const bool ok = s.table.exact || s.monotone;
    write_rate_csv(dir / "energy-rate.csv", s.table);
    json j = rate_summary(s.table, Band{});
    j["target"] = s.target;
    j["energies"] = s.energies;
    j["strictly_decreasing"] = s.monotone;
    j["verdict"] = s.table.exact ? "exact" : (ok ? "pass" : "fail");
    write_json(dir / "energy-rate.json", j);
    write_rate_svg(dir / "energy-rate.svg", s.table, "energy-rate");
    print_table("energy-rate", s.table, Band{});
    std::cout << "  target=" << s.target << "  strictly decreasing=" << (s.monotone ? "yes" : "no") << '\n';
    return ok ? kPass : kBandFail;
}

int remainder_rate(const fs::path& dir, const KernelOpts& ko, const GridOpts& go, const std::string& func,
                   const std::vector<double>& eps)
{
    check_ladder(eps);
    const UniformGrid grid = make_grid(ko.n, go);
    const auto s = remainder_study(sample_named(grid, func), make_mollifier(ko.n, ko.profile), eps);
    const RateTable t = fit_rate(s.epsilons, s.near_margin);
    const bool ok = s.decreasing && s.far_exactly_zero;
    write_rate_csv(dir / "remainder-rate.csv", t);
    json j = rate_summary(t, Band{});
    j["far_margin"] = s.far_margin;
    j["decreasing"] = s.decreasing;
    j["far_exactly_zero"] = s.far_exactly_zero;
    j["verdict"] = ok ? "pass" : "fail";
    write_json(dir / "remainder-rate.json", j);
    write_rate_svg(dir / "remainder-rate.svg", t, "remainder-rate");
    print_table("remainder-rate (margin eps R / 2)", t, Band{});
    std::cout << "  margin > eps R exactly zero: " << (s.far_exactly_zero ? "yes" : "no") << '\n';
    return ok ? kPass : kBandFail;
}

int oracle_check(const fs::path& dir, const KernelOpts& ko, const GridOpts& go, const std::string& func, double eps,
                 double tol, std::size_t audit_n, double audit_eps)
{
    const UniformGrid grid = make_grid(ko.n, go);
    const MollifierSpec m = make_mollifier(ko.n, ko.profile);
    const Kernel k(m, eps);
    const Field c = sample_named(grid, func);
    const auto t0 = std::chrono::steady_clock::now();
    const Field direct = apply_direct(k, c);
    const auto t1 = std::chrono::steady_clock::now();
    const Field fast = apply_fft(k, c);
    const auto t2 = std::chrono::steady_clock::now();
    const double rel = l2_norm(fast - direct) / l2_norm(direct);
    if (tol <= 0.0) tol = ko.n == 1 ? 1e-10 : 1e-9;

    // Quadratic-form audit on a small grid: <L u, u> against the brute-force pair sum.
    const UniformGrid small = make_grid(ko.n, GridOpts{go.domain, audit_n, go.L});
    const Kernel ka(m, audit_eps);
    const Field u = sample_named(small, func);
    const double quad = inner(apply_direct(ka, u), u);
    const double pairs = pair_interaction_sum(ka, u);
    const double ratio = quad / pairs;
    const bool audit_ok = std::abs(ratio - 0.5) <= 1e-10;

    json j;
    j["relative_l2_difference"] = rel;
    j["tolerance"] = tol;
    j["direct_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    j["fft_seconds"] = std::chrono::duration<double>(t2 - t1).count();
    j["energy_audit"] = {{"cells", audit_n},
                         {"epsilon", audit_eps},
                         {"quadratic_form", quad},
                         {"pair_sum", pairs},
                         {"ratio", ratio},
                         {"energy_half_quadratic_form", 0.5 * quad},
                         {"energy_quarter_pair_sum", 0.25 * pairs}};
    const bool ok = rel <= tol && audit_ok;
    j["verdict"] = ok ? "pass" : "fail";
    write_json(dir / "oracle-check.json", j);
    std::cout << "fft vs direct relative L2 difference: " << rel << " (tolerance " << tol << ")\n"
              << "<L u, u> / sum J |u_i - u_j|^2 = " << ratio << " on N = " << audit_n << '\n'
              << "verdict: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kPass : kBandFail;
}

std::size_t steps_per_record(double record_dt, double tau)
{
    if (record_dt <= 0.0) return 1;
    const double r = record_dt / tau;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-6 * r) throw UsageError("--record-dt must be a positive multiple of --tau");
    return static_cast<std::size_t>(n);
}

struct SolveOpts {
    std::string eq = "nonlocal-ch";
    double eps = 0.1;
    std::string potential = "doublewell:K=1";
    double T = 0.05;
    double tau = 1e-5;
    double S = 4.0;
    double mobility = 1.0;
    std::string scheme = "semi-implicit";
    double record_dt = 0.0;
    std::size_t checkpoint_every = 0;
    std::string init = "ch-initial";
    std::string init_file;
    bool allow_unstable = false;
    bool local_preconditioner = true;
};

SolverConfig solver_config(const SolveOpts& s)
{
    SolverConfig c;
    c.mobility = s.mobility;
    c.tau = s.tau;
    c.final_time = s.T;
    c.stabilization = s.S;
    c.scheme = parse_scheme(s.scheme);
    c.record_every = steps_per_record(s.record_dt, s.tau);
    c.allow_unstable = s.allow_unstable;
    c.local_preconditioner = s.local_preconditioner;
    return c;
}

int solve(const fs::path& dir, const KernelOpts& ko, const GridOpts& go, const SolveOpts& so)
{
    const Equation eq = parse_equation(so.eq);
    const Potential pot = parse_potential(so.potential);
    const Field initial = so.init_file.empty() ? sample_named(make_grid(ko.n, go), so.init)
                                               : read_field_binary(so.init_file);
    std::optional<Kernel> kernel;
    if (is_nonlocal(eq)) kernel.emplace(make_mollifier(initial.grid().dimension(), ko.profile), so.eps);
    const SolverConfig cfg = solver_config(so);
    std::size_t records = 0;
    std::optional<Field> last;
    const auto rec = run(eq, initial, cfg, pot, kernel, [&](std::size_t step, double, const Field& c) {
        if (so.checkpoint_every > 0 && records % so.checkpoint_every == 0)
            write_field_binary(dir / ("solve-step-" + std::to_string(step) + ".bin"), c);
        ++records;
        last = c;
    });
    write_trajectory_csv(dir / "solve-trajectory.csv", rec);
    write_field_binary(dir / "solve-final.bin", *last);
    write_field_csv(dir / "solve-final.csv", *last);
    std::cout << to_string(eq) << ": " << rec.times.size() << " records, t = " << rec.times.back()
              << ", mass drift = " << std::abs(rec.mass.back() - rec.mass.front())
              << ", energy " << rec.energy.front() << " -> " << rec.energy.back() << '\n';
    return kPass;
}

std::string eps_tag(double e)
{
    std::ostringstream os;
    os << e;
    return os.str();
}

void write_gronwall_csv(const fs::path& path, const GronwallTrace& tr)
{
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write '" + path.string() + "'");
    os << "t,ddt_half_hm1_sq,half_l2_sq,half_energy,hm1_sq,consistency_sq,lhs,rhs_unit\n";
    for (const auto& r : tr.rows)
        os << format_double(r.time) << ',' << format_double(r.ddt_half_hm1_sq) << ',' << format_double(r.half_l2_sq)
           << ',' << format_double(r.half_energy) << ',' << format_double(r.hm1_sq) << ','
           << format_double(r.consistency_sq) << ',' << format_double(r.lhs()) << ',' << format_double(r.rhs_unit())
           << '\n';
}

int solution_rate(const fs::path& dir, const KernelOpts& ko, const GridOpts& go, const std::string& flow,
                  const std::string& init, const std::vector<double>& eps, const SolveOpts& so, std::size_t refine,
                  const Band& given, std::size_t threads)
{
    const bool ch = flow == "ch";
    const UniformGrid grid = make_grid(ko.n, go);
    const Field initial = sample_named(grid, init.empty() ? (ch ? "ch-initial" : "ac-initial") : init);
    SolutionStudyConfig cfg;
    cfg.flow = ch ? FlowKind::CahnHilliard : FlowKind::AllenCahn;
    cfg.solver = solver_config(so);
    cfg.reference_refinement = refine;
    cfg.epsilons = eps;
    cfg.threads = threads;
    const auto st = solution_convergence_study(initial, parse_potential(so.potential),
                                               make_mollifier(ko.n, ko.profile), cfg);
    const Band band = band_or(given, 0.35, 0.8);
    const Band open;

    bool ok = true;
    json summary;
    auto table = [&](const std::string& norm, const RateTable& t, bool primary) {
        const bool pass = emit_table(dir, "solution-rate-" + norm, t, primary ? band : open, 0.5,
                                     {{"primary", primary}});
        if (primary) ok = ok && pass;
        summary["slopes"][norm] = std::isfinite(t.slope) ? json(t.slope) : json(nullptr);
    };
    table("sup-hminus1", st.sup_hminus1, ch);
    table("spacetime-l2", st.spacetime_l2, ch);
    table("sup-l2", st.sup_l2, !ch);
    table("sup-h-minus-half", st.sup_h_minus_half, false);
    table("spacetime-l4", st.spacetime_l4, false);
    table("energy-integral", st.energy_integral, false);

    summary["flow"] = flow;
    summary["band"] = {{"lo", band.lo}, {"hi", band.hi}};
    summary["reference"] = {{"tau", so.tau / static_cast<double>(refine)},
                            {"h3_sup", st.reference_h3_sup},
                            {"h3_l2_time", st.reference_h3_l2},
                            {"oscillation_l2_sup", st.reference_scale}};
    if (ch) {
        for (const auto& s : st.series) {
            write_gronwall_csv(dir / ("solution-rate-gronwall-eps" + eps_tag(s.epsilon) + ".csv"), s.gronwall);
            summary["gronwall"].push_back(
                {{"epsilon", s.epsilon}, {"constant", s.gronwall.constant}, {"holds", s.gronwall.holds}});
        }
    }
    summary["verdict"] = ok ? "pass" : "fail";
    write_json(dir / "solution-rate.json", summary);
    std::cout << "reference H3 norm: sup " << st.reference_h3_sup << ", L2 in time " << st.reference_h3_l2 << '\n'
              << "verdict: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kPass : kBandFail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical lab for nonlocal-to-local Cahn-Hilliard and Allen-Cahn convergence"};
    app.require_subcommand(1);

    Common common;
    KernelOpts ko;
    GridOpts go;
    Band band;
    std::vector<double> eps = kRateLadder;
    std::string func = "cospix";

    auto* ck = app.add_subcommand("check-kernel", "normalization and moments of J_eps");
    double ck_eps = 0.1;
    add_common(ck, common);
    add_kernel(ck, ko);
    ck->add_option("--eps", ck_eps, "kernel width")->capture_default_str()->check(CLI::PositiveNumber);

    auto* sr = app.add_subcommand("symbol-rate", "rate of |sigma_eps(xi) - |xi|^2| / |xi|^3");
    int lattice = 8;
    add_common(sr, common);
    add_kernel(sr, ko);
    add_eps_list(sr, eps);
    add_band(sr, band);
    sr->add_option("--lattice", lattice, "frequencies +-1..+-lattice per axis")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    auto* orate = app.add_subcommand("operator-rate", "rate of ||L_eps c + Delta c||_L2");
    for (auto* s : {orate}) {
        add_common(s, common);
        add_kernel(s, ko);
        add_grid(s, go);
        add_eps_list(s, eps);
        add_band(s, band);
        s->add_option("--func", func, "test function")->capture_default_str()->check(CLI::IsMember(test_function_names()));
    }

    auto* er = app.add_subcommand("energy-rate", "|E_eps(c) - (1/2) int |grad c|^2| across eps");
    auto* rr = app.add_subcommand("remainder-rate", "interior remainder of the reflected operator");
    for (auto* s : {er, rr}) {
        add_common(s, common);
        add_kernel(s, ko);
        add_grid(s, go);
        add_eps_list(s, eps);
        s->add_option("--func", func, "test function")->capture_default_str()->check(CLI::IsMember(test_function_names()));
    }

    auto* oc = app.add_subcommand("oracle-check", "FFT operator against direct summation; quadratic-form audit");
    double oc_eps = 0.1;
    double oc_tol = 0.0;
    std::size_t audit_n = 32;
    double audit_eps = 0.25;
    add_common(oc, common);
    add_kernel(oc, ko);
    add_grid(oc, go);
    oc->add_option("--func", func, "test function")->capture_default_str()->check(CLI::IsMember(test_function_names()));
    oc->add_option("--eps", oc_eps, "kernel width")->capture_default_str()->check(CLI::PositiveNumber);
    oc->add_option("--tol", oc_tol, "relative tolerance (0: 1e-10 in 1D, 1e-9 in 2D)")->capture_default_str();
    oc->add_option("--audit-N", audit_n, "cells per axis of the brute-force audit")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    oc->add_option("--audit-eps", audit_eps, "kernel width of the audit")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    auto* sv = app.add_subcommand("solve", "one gradient-flow run: trajectory CSV and checkpoints");
    SolveOpts so;
    add_common(sv, common);
    add_kernel(sv, ko);
    add_grid(sv, go);
    sv->add_option("--eq", so.eq, "local-ch, nonlocal-ch, local-ac or nonlocal-ac")
        ->capture_default_str()
        ->check(CLI::IsMember({"local-ch", "nonlocal-ch", "local-ac", "nonlocal-ac"}));
    sv->add_option("--eps", so.eps, "kernel width (nonlocal equations)")->capture_default_str()->check(CLI::PositiveNumber);
    sv->add_option("--potential", so.potential, "doublewell:K=.. or log:theta=..,theta_c=..,delta=..")
        ->capture_default_str();
    sv->add_option("--T", so.T, "final time")->capture_default_str()->check(CLI::PositiveNumber);
    sv->add_option("--tau", so.tau, "time step")->capture_default_str()->check(CLI::PositiveNumber);
    sv->add_option("--S", so.S, "stabilization (>= alpha of the potential)")->capture_default_str();
    sv->add_option("--mobility", so.mobility, "Cahn-Hilliard mobility")->capture_default_str();
    sv->add_option("--scheme", so.scheme, "semi-implicit or explicit")
        ->capture_default_str()
        ->check(CLI::IsMember({"semi-implicit", "explicit"}));
    sv->add_option("--record-dt", so.record_dt, "time between recorded states (0: every step)")->capture_default_str();
    sv->add_option("--checkpoint-every", so.checkpoint_every, "write a checkpoint every k-th record (0: final only)")
        ->capture_default_str();
    sv->add_option("--init", so.init, "named initial profile")
        ->capture_default_str()
        ->check(CLI::IsMember(test_function_names()));
    sv->add_option("--init-file", so.init_file, "initial field checkpoint (overrides --init and the grid)");
    sv->add_flag("--allow-unstable", so.allow_unstable, "warn instead of failing on a violated stability rule");
    sv->add_option("--local-preconditioner", so.local_preconditioner,
                   "nonlocal flows: treat -Delta implicitly (false: stabilizer only)")
        ->capture_default_str();

    auto* sol = app.add_subcommand("solution-rate", "nonlocal vs local solution error across eps");
    SolveOpts sso;
    sso.tau = 1e-6;
    sso.record_dt = 1e-3;
    std::string flow = "ch";
    std::string sol_init;
    std::size_t refine = 10;
    std::vector<double> sol_eps = kSolutionLadder;
    GridOpts sol_grid{"neumann", 1024, 1.0};
    add_common(sol, common);
    add_kernel(sol, ko);
    add_grid(sol, sol_grid);
    add_band(sol, band);
    add_eps_list(sol, sol_eps);
    sol->add_option("--flow", flow, "ch or ac")->capture_default_str()->check(CLI::IsMember({"ch", "ac"}));
    sol->add_option("--potential", sso.potential, "free-energy density")->capture_default_str();
    sol->add_option("--T", sso.T, "final time")->capture_default_str()->check(CLI::PositiveNumber);
    sol->add_option("--tau", sso.tau, "time step of the nonlocal runs")->capture_default_str()->check(CLI::PositiveNumber);
    sol->add_option("--S", sso.S, "stabilization")->capture_default_str();
    sol->add_option("--mobility", sso.mobility, "Cahn-Hilliard mobility")->capture_default_str();
    sol->add_option("--record-dt", sso.record_dt, "time between compared states")->capture_default_str();
    sol->add_option("--ref-refine", refine, "reference time step is tau / ref-refine")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sol->add_option("--init", sol_init, "named initial profile (default ch-initial / ac-initial)")
        ->check(CLI::IsMember(test_function_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!common.config.empty()) apply_config(sub, common.config);
        if (common.threads == 0) throw UsageError("--threads must be positive");
        const fs::path dir = prepare_output(common, sub);
        const std::string name = sub->get_name();
        if (name == "check-kernel") return check_kernel(dir, ko, ck_eps);
        if (name == "symbol-rate") return symbol_rate(dir, ko, eps, lattice, band, common.threads);
        if (name == "operator-rate") return operator_rate(dir, ko, go, func, eps, band, common.threads);
        if (name == "energy-rate") return energy_rate(dir, ko, go, func, eps, common.threads);
        if (name == "remainder-rate") return remainder_rate(dir, ko, go, func, eps);
        if (name == "oracle-check") return oracle_check(dir, ko, go, func, oc_eps, oc_tol, audit_n, audit_eps);
        if (name == "solve") return solve(dir, ko, go, so);
        if (name == "solution-rate") {
            check_ladder(sol_eps);
            return solution_rate(dir, ko, sol_grid, flow, sol_init, sol_eps, sso, refine, band, common.threads);
        }
        throw UsageError("unknown subcommand '" + name + "'");
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBandFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
