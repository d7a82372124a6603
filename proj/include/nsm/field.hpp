#pragma once
/**
 * @brief Uniform node grid on [0, L] and the sampled state (rho, u, theta, E, b).
 */
#include <cstddef>
#include <string>
#include <vector>

#include "nsm/core.hpp"

namespace nsm {

/// uniform node grid x_i = i*dx, i = 0..N, on [0, L]
struct Grid1D {
    double L = 40.0;
    std::size_t N = 400;

    Grid1D() = default;
    Grid1D(double length, std::size_t cells) : L(length), N(cells) { validate(); }

    [[nodiscard]] double dx() const { return L / static_cast<double>(N); }
    [[nodiscard]] std::size_t nodes() const { return N + 1; }
    [[nodiscard]] double x(std::size_t i) const { return static_cast<double>(i) * dx(); }

    [[nodiscard]] std::vector<double> positions() const {
        std::vector<double> xs(nodes());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x(i);
        return xs;
    }

    void validate() const {
        if (N < 16) throw ConfigError("grid needs at least 16 cells");
        if (!(L > 0.0)) throw ConfigError("grid length must be positive");
    }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

/// grid-sampled (rho, u, theta, E, b) at one time instant
struct FieldState {
    Grid1D grid;
    double t = 0.0;
    std::vector<double> rho, u, theta, E, b;

    FieldState() = default;
    explicit FieldState(const Grid1D& g, double time = 0.0)
        : grid(g), t(time), rho(g.nodes(), 1.0), u(g.nodes(), 0.0), theta(g.nodes(), 1.0), E(g.nodes(), 0.0),
          b(g.nodes(), 0.0) {}

    [[nodiscard]] std::size_t size() const { return rho.size(); }

    [[nodiscard]] bool consistent() const {
        const auto n = grid.nodes();
        return rho.size() == n && u.size() == n && theta.size() == n && E.size() == n && b.size() == n;
    }

    /// index of the first node with non-positive density or temperature, or size() if none
    [[nodiscard]] std::size_t first_nonpositive() const {
        for (std::size_t i = 0; i < size(); ++i)
            if (!(rho[i] > 0.0) || !(theta[i] > 0.0)) return i;
        return size();
    }
};

/// one grid cell outside the pointwise bands expected of a solution near the wave profile
struct BoundViolation {
    std::size_t index;
    double x;
    std::string field;
    double value;
    double lower;
    double upper;
};

/// @brief bands for u, theta and rho around the end states
///
/// theta in (min(theta_-,theta_+)/4, 3/2 max(theta_-,theta_+)), |u| < 2 max(|u_-|,|u_+|),
/// rho in (rho_+ (3/4 theta_-/theta_+)^(1/(gamma-1)) / 4, 7/4 rho_+).
/// These are monitors: they hold under smallness hypotheses the caller may violate on purpose.
struct PointwiseBands {
    double theta_lo, theta_hi, u_abs_hi, rho_lo, rho_hi;
};

inline PointwiseBands pointwise_bands(const GasParams& p, const EndStates& e) {
    PointwiseBands b{};
    b.theta_lo = 0.25 * std::min(e.theta_minus, e.theta_plus);
    b.theta_hi = 1.5 * std::max(e.theta_minus, e.theta_plus);
    b.u_abs_hi = 2.0 * std::max(std::abs(e.u_minus), std::abs(e.u_plus));
    const double base = e.rho_plus * std::pow(0.75 * e.theta_minus / e.theta_plus, 1.0 / (p.gamma - 1.0));
    b.rho_lo = 0.25 * base;
    b.rho_hi = 1.75 * e.rho_plus;
    return b;
}

inline std::vector<BoundViolation> check_pointwise_bounds(const GasParams& p, const FieldState& s,
                                                          const EndStates& e) {
    const auto bands = pointwise_bands(p, e);
    std::vector<BoundViolation> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = s.grid.x(i);
        if (!(s.theta[i] > bands.theta_lo && s.theta[i] < bands.theta_hi))
            out.push_back({i, x, "theta", s.theta[i], bands.theta_lo, bands.theta_hi});
        if (!(std::abs(s.u[i]) < bands.u_abs_hi))
            out.push_back({i, x, "u", s.u[i], -bands.u_abs_hi, bands.u_abs_hi});
        if (!(s.rho[i] > bands.rho_lo && s.rho[i] < bands.rho_hi))
            out.push_back({i, x, "rho", s.rho[i], bands.rho_lo, bands.rho_hi});
    }
    return out;
}

} // namespace nsm
