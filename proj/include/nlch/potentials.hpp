#ifndef NLCH_POTENTIALS_HPP_
#define NLCH_POTENTIALS_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "nlch/grid.hpp"

namespace nlch {

/// f(c) = K (1 - c^2)^2.
struct DoubleWell {
    double K = 1.0;
};

/// f(c) = (theta/2)[(1-c)ln(1-c) + (1+c)ln(1+c)] - (theta_c/2) c^2 on [-1 + delta, 1 - delta].
struct Logarithmic {
    double theta = 0.8;
    double theta_c = 1.0;
    double delta = 1e-6;
};

/// Free-energy density with its concavity bound alpha (f'' >= -alpha).
class Potential {
public:
    explicit Potential(DoubleWell dw) : kind_(dw), alpha_(4.0 * dw.K)
    {
        if (!(dw.K > 0.0)) throw std::invalid_argument("double-well K must be positive");
    }

    explicit Potential(Logarithmic lg) : kind_(lg), alpha_(lg.theta_c)
    {
        if (!(lg.theta > 0.0 && lg.theta < lg.theta_c))
            throw std::invalid_argument("logarithmic potential needs 0 < theta < theta_c");
        if (!(lg.delta > 0.0 && lg.delta < 1.0))
            throw std::invalid_argument("clamp width must lie in (0, 1)");
    }

    double alpha() const { return alpha_; }
    bool is_double_well() const { return std::holds_alternative<DoubleWell>(kind_); }
    const std::variant<DoubleWell, Logarithmic>& kind() const { return kind_; }

    /// Number of logarithmic evaluations that hit the clamp, shared across copies.
    std::uint64_t clamp_events() const { return clamp_events_->load(); }

    double f(double c) const
    {
        if (auto* dw = std::get_if<DoubleWell>(&kind_)) {
            const double q = 1.0 - c * c;
            return dw->K * q * q;
        }
        const auto& lg = std::get<Logarithmic>(kind_);
        const double s = clamp(c, lg);
        return 0.5 * lg.theta * ((1.0 - s) * std::log(1.0 - s) + (1.0 + s) * std::log(1.0 + s))
               - 0.5 * lg.theta_c * s * s;
    }

    double fprime(double c) const
    {
        const auto [vex, cave] = split(c);
        return vex + cave;
    }

    double fsecond(double c) const
    {
        if (auto* dw = std::get_if<DoubleWell>(&kind_)) return 12.0 * dw->K * c * c - 4.0 * dw->K;
        const auto& lg = std::get<Logarithmic>(kind_);
        const double s = clamp(c, lg);
        return lg.theta / (1.0 - s * s) - lg.theta_c;
    }

    /// f' = convex part + concave part, with the convex part nondecreasing and
    /// the concave part having slope in [-alpha, 0].
    std::pair<double, double> split(double c) const
    {
        if (auto* dw = std::get_if<DoubleWell>(&kind_)) return {4.0 * dw->K * c * c * c, -4.0 * dw->K * c};
        const auto& lg = std::get<Logarithmic>(kind_);
        const double s = clamp(c, lg);
        return {0.5 * lg.theta * std::log((1.0 + s) / (1.0 - s)), -lg.theta_c * s};
    }

    Field fprime(const Field& c) const
    {
        Field out(c.grid());
        for (std::size_t i = 0; i < c.size(); ++i) out[i] = fprime(c[i]);
        return out;
    }

    /// Integral of f(c) over the domain.
    double bulk_energy(const Field& c) const
    {
        double s = 0.0;
        for (double v : c.values()) s += f(v);
        return s * c.grid().cell_volume();
    }

    std::string describe() const
    {
        std::ostringstream os;
        if (auto* dw = std::get_if<DoubleWell>(&kind_)) {
            os << "doublewell:K=" << dw->K;
        } else {
            const auto& lg = std::get<Logarithmic>(kind_);
            os << "log:theta=" << lg.theta << ",theta_c=" << lg.theta_c << ",delta=" << lg.delta;
        }
        return os.str();
    }

private:
    double clamp(double c, const Logarithmic& lg) const
    {
        const double hi = 1.0 - lg.delta;
        if (c > hi || c < -hi) {
            clamp_events_->fetch_add(1, std::memory_order_relaxed);
            return c > 0 ? hi : -hi;
        }
        return c;
    }

    std::variant<DoubleWell, Logarithmic> kind_;
    double alpha_;
    std::shared_ptr<std::atomic<std::uint64_t>> clamp_events_ =
        std::make_shared<std::atomic<std::uint64_t>>(0);
};

/// Parses "doublewell:K=1" or "log:theta=0.8,theta_c=1[,delta=1e-6]".
inline Potential parse_potential(std::string_view text)
{
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    std::map<std::string, double> params;
    if (colon != std::string_view::npos) {
        std::string rest(text.substr(colon + 1));
        std::istringstream is(rest);
        std::string item;
        while (std::getline(is, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("malformed potential parameter '" + item + "'");
            try {
                params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw std::invalid_argument("malformed potential parameter '" + item + "'");
            }
        }
    }
    auto take = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        if (it == params.end()) return fallback;
        const double v = it->second;
        params.erase(it);
        return v;
    };
    if (name == "doublewell") {
        Potential p(DoubleWell{take("K", 1.0)});
        if (!params.empty()) throw std::invalid_argument("unknown double-well parameter '" + params.begin()->first + "'");
        return p;
    }
    if (name == "log") {
        Logarithmic lg;
        lg.theta = take("theta", lg.theta);
        lg.theta_c = take("theta_c", lg.theta_c);
        lg.delta = take("delta", lg.delta);
        if (!params.empty()) throw std::invalid_argument("unknown logarithmic parameter '" + params.begin()->first + "'");
        return Potential(lg);
    }
    throw std::invalid_argument("unknown potential '" + name + "'");
}

} // namespace nlch

#endif // NLCH_POTENTIALS_HPP_
