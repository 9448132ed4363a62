#ifndef NLCH_GRID_HPP_
#define NLCH_GRID_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace nlch {

enum class Boundary { Periodic = 0, Neumann = 1 };

inline Boundary parse_boundary(std::string_view s)
{
    if (s == "periodic") return Boundary::Periodic;
    if (s == "neumann") return Boundary::Neumann;
    throw std::invalid_argument("unknown boundary type '" + std::string(s) + "'");
}

inline std::string_view to_string(Boundary b)
{
    return b == Boundary::Periodic ? "periodic" : "neumann";
}

/// Cell-centred tensor grid on the box [0, L_0] x ... x [0, L_{n-1}], n in {1, 2}.
/// Node i on an axis sits at (i + 1/2) h.
class UniformGrid {
public:
    UniformGrid(std::vector<double> extents, std::vector<std::size_t> cells, Boundary boundary)
        : dimension_(static_cast<int>(extents.size())), boundary_(boundary)
    {
        if (dimension_ != 1 && dimension_ != 2)
            throw std::invalid_argument("grid dimension must be 1 or 2");
        if (cells.size() != extents.size())
            throw std::invalid_argument("extent/cell count mismatch");
        for (int a = 0; a < dimension_; ++a) {
            if (!(extents[a] > 0.0) || cells[a] == 0)
                throw std::invalid_argument("grid extents and cell counts must be positive");
            extents_[a] = extents[a];
            cells_[a] = cells[a];
        }
    }

    static UniformGrid line(double length, std::size_t cells, Boundary b)
    {
        return UniformGrid({length}, {cells}, b);
    }

    static UniformGrid square(double length, std::size_t cells, Boundary b)
    {
        return UniformGrid({length, length}, {cells, cells}, b);
    }

    int dimension() const { return dimension_; }
    Boundary boundary() const { return boundary_; }
    double extent(int axis) const { return extents_[axis]; }
    std::size_t cells(int axis) const { return cells_[axis]; }
    double spacing(int axis) const { return extents_[axis] / static_cast<double>(cells_[axis]); }
    double node(int axis, std::size_t i) const { return (static_cast<double>(i) + 0.5) * spacing(axis); }

    std::size_t size() const { return cells_[0] * cells_[1]; }

    double cell_volume() const
    {
        double v = 1.0;
        for (int a = 0; a < dimension_; ++a) v *= spacing(a);
        return v;
    }

    double volume() const
    {
        double v = 1.0;
        for (int a = 0; a < dimension_; ++a) v *= extents_[a];
        return v;
    }

    double max_spacing() const
    {
        double h = 0.0;
        for (int a = 0; a < dimension_; ++a) h = std::max(h, spacing(a));
        return h;
    }

    friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

private:
    int dimension_;
    Boundary boundary_;
    std::array<double, 2> extents_{1.0, 1.0};
    std::array<std::size_t, 2> cells_{1, 1};
};

/// Node values on a grid, stored row-major (axis 0 slowest).
class Field {
public:
    explicit Field(UniformGrid grid, double fill = 0.0)
        : grid_(std::move(grid)), values_(grid_.size(), fill)
    {
    }

    Field(UniformGrid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("field value count does not match grid");
    }

    const UniformGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const
    {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    Field& operator+=(const Field& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    Field& operator-=(const Field& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    Field& operator*=(double s)
    {
        for (double& v : values_) v *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, double s) { return a *= s; }
    friend Field operator*(double s, Field a) { return a *= s; }

private:
    void check_same(const Field& o) const
    {
        if (!(o.grid_ == grid_)) throw std::invalid_argument("fields live on different grids");
    }

    UniformGrid grid_;
    std::vector<double> values_;
};

/// Evaluates f at every node. `f` takes one coordinate per axis.
template <class F>
Field sample(const UniformGrid& grid, F&& f)
{
    Field out(grid);
    if (grid.dimension() == 1) {
        if constexpr (std::is_invocable_r_v<double, F, double>) {
            for (std::size_t i = 0; i < grid.cells(0); ++i) out[i] = f(grid.node(0, i));
            return out;
        }
        throw std::invalid_argument("1D grid needs a function of one coordinate");
    }
    if constexpr (std::is_invocable_r_v<double, F, double, double>) {
        const std::size_t n1 = grid.cells(1);
        for (std::size_t i = 0; i < grid.cells(0); ++i)
            for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] = f(grid.node(0, i), grid.node(1, j));
        return out;
    }
    throw std::invalid_argument("2D grid needs a function of two coordinates");
}

/// Midpoint rule.
inline double integrate(const Field& c)
{
    double s = 0.0;
    for (double v : c.values()) s += v;
    return s * c.grid().cell_volume();
}

inline double mean(const Field& c) { return integrate(c) / c.grid().volume(); }

inline double inner(const Field& a, const Field& b)
{
    if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid().cell_volume();
}

inline double l2_norm(const Field& c) { return std::sqrt(inner(c, c)); }

inline double lp_norm(const Field& c, double p)
{
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (p == 2.0) return l2_norm(c);
    double s = 0.0;
    for (double v : c.values()) s += std::pow(std::abs(v), p);
    return std::pow(s * c.grid().cell_volume(), 1.0 / p);
}

inline double linf_norm(const Field& c)
{
    double m = 0.0;
    for (double v : c.values()) m = std::max(m, std::abs(v));
    return m;
}

} // namespace nlch

#endif // NLCH_GRID_HPP_
