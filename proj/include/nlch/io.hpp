#ifndef NLCH_IO_HPP_
#define NLCH_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlch/grid.hpp"
#include "nlch/rate.hpp"
#include "nlch/solvers.hpp"

namespace nlch {

/// Shortest round-trip representation used by every CSV writer, so identical
/// inputs produce byte-identical files.
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    return os;
}

template <class T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("truncated field checkpoint");
    return v;
}

} // namespace detail

/// Binary checkpoint, native little-endian:
///   int32 n | int64 N_i (n entries) | float64 L_i (n entries) | int32 boundary (0 periodic, 1 neumann)
///   | float64 values, row-major (axis 0 slowest).
inline void write_field_binary(const std::filesystem::path& path, const Field& c)
{
    auto os = detail::open_output(path, std::ios::out | std::ios::binary);
    const UniformGrid& g = c.grid();
    detail::put<std::int32_t>(os, g.dimension());
    for (int a = 0; a < g.dimension(); ++a) detail::put<std::int64_t>(os, static_cast<std::int64_t>(g.cells(a)));
    for (int a = 0; a < g.dimension(); ++a) detail::put<double>(os, g.extent(a));
    detail::put<std::int32_t>(os, static_cast<std::int32_t>(g.boundary()));
    os.write(reinterpret_cast<const char*>(c.values().data()),
             static_cast<std::streamsize>(c.size() * sizeof(double)));
    if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

inline Field read_field_binary(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read '" + path.string() + "'");
    const auto n = detail::get<std::int32_t>(is);
    if (n != 1 && n != 2) throw std::runtime_error("bad dimension in field checkpoint");
    std::vector<std::size_t> cells;
    std::vector<double> extents;
    for (int a = 0; a < n; ++a) {
        const auto N = detail::get<std::int64_t>(is);
        if (N <= 0) throw std::runtime_error("bad cell count in field checkpoint");
        cells.push_back(static_cast<std::size_t>(N));
    }
    for (int a = 0; a < n; ++a) extents.push_back(detail::get<double>(is));
    const auto b = detail::get<std::int32_t>(is);
    if (b != 0 && b != 1) throw std::runtime_error("bad boundary tag in field checkpoint");
    UniformGrid grid(extents, cells, static_cast<Boundary>(b));
    std::vector<double> values(grid.size());
    is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated field checkpoint");
    return Field(grid, std::move(values));
}

/// CSV with node coordinates: "x,value" (1D) or "x,y,value" (2D).
inline void write_field_csv(const std::filesystem::path& path, const Field& c)
{
    auto os = detail::open_output(path);
    const UniformGrid& g = c.grid();
    if (g.dimension() == 1) {
        os << "x,value\n";
        for (std::size_t i = 0; i < g.cells(0); ++i) os << format_double(g.node(0, i)) << ',' << format_double(c[i]) << '\n';
        return;
    }
    os << "x,y,value\n";
    const std::size_t n1 = g.cells(1);
    for (std::size_t i = 0; i < g.cells(0); ++i)
        for (std::size_t j = 0; j < n1; ++j)
            os << format_double(g.node(0, i)) << ',' << format_double(g.node(1, j)) << ','
               << format_double(c[i * n1 + j]) << '\n';
}

/// Columns t,mass,energy.
inline void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& rec)
{
    auto os = detail::open_output(path);
    os << "t,mass,energy\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        os << format_double(rec.times[i]) << ',' << format_double(rec.mass[i]) << ',' << format_double(rec.energy[i])
           << '\n';
}

/// Columns epsilon,error,included_in_fit.
inline void write_rate_csv(const std::filesystem::path& path, const RateTable& t)
{
    auto os = detail::open_output(path);
    os << "epsilon,error,included_in_fit\n";
    for (std::size_t i = 0; i < t.epsilons.size(); ++i)
        os << format_double(t.epsilons[i]) << ',' << format_double(t.errors[i]) << ',' << (t.included[i] ? 1 : 0)
           << '\n';
}

inline std::string verdict(const RateTable& t, const Band& band)
{
    if (t.exact) return "exact";
    if (std::isnan(t.slope)) return "fail";
    return band.contains(t.slope) ? "pass" : "fail";
}

inline nlohmann::ordered_json rate_summary(const RateTable& t, const Band& band)
{
    auto num = [](double v) -> nlohmann::ordered_json {
        if (!std::isfinite(v)) return nullptr;
        return v;
    };
    nlohmann::ordered_json j;
    j["slope"] = num(t.slope);
    j["intercept"] = num(t.intercept);
    j["r_squared"] = num(t.r_squared);
    j["fitted_points"] = t.fitted_points();
    j["band"] = {{"lo", num(band.lo)}, {"hi", num(band.hi)}};
    j["verdict"] = verdict(t, band);
    return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j)
{
    auto os = detail::open_output(path);
    os << j.dump(2) << '\n';
}

/// Log-log plot of a rate table with the fitted line and an optional reference slope.
inline void write_rate_svg(const std::filesystem::path& path, const RateTable& t, const std::string& title,
                           double reference_slope = std::numeric_limits<double>::quiet_NaN())
{
    constexpr double W = 480, H = 360, M = 50;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.errors.size(); ++i)
        if (t.errors[i] > 0.0) {
            lx.push_back(std::log10(t.epsilons[i]));
            ly.push_back(std::log10(t.errors[i]));
        }
    auto os = detail::open_output(path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << title << "</text>\n";
    if (lx.size() >= 2) {
        const auto [xmin_it, xmax_it] = std::minmax_element(lx.begin(), lx.end());
        const auto [ymin_it, ymax_it] = std::minmax_element(ly.begin(), ly.end());
        const double x0 = *xmin_it - 0.1, x1 = *xmax_it + 0.1;
        const double y0 = *ymin_it - 0.2, y1 = *ymax_it + 0.2;
        auto px = [&](double x) { return M + (x - x0) / (x1 - x0) * (W - 2 * M); };
        auto py = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };
        os << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 eps</text>\n";
        os << "<text x=\"14\" y=\"" << H / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
           << H / 2 << ")\">log10 error</text>\n";
        if (std::isfinite(t.slope)) {
            const double ly0 = (t.slope * x0 * std::log(10.0) + t.intercept) / std::log(10.0);
            const double ly1 = (t.slope * x1 * std::log(10.0) + t.intercept) / std::log(10.0);
            os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(ly0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(ly1)
               << "\" stroke=\"steelblue\"/>\n";
        }
        if (std::isfinite(reference_slope)) {
            const double yr0 = ly.front() + reference_slope * (x0 - lx.front());
            const double yr1 = ly.front() + reference_slope * (x1 - lx.front());
            os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(yr0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yr1)
               << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
        }
        for (std::size_t i = 0; i < lx.size(); ++i)
            os << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i]) << "\" r=\"4\" fill=\"crimson\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace nlch

#endif // NLCH_IO_HPP_
