#pragma once
/**
 * @brief Perturbation variables, norms, energy and dissipation measurements,
 * the two functional inequalities used as oracles, and convergence verdicts.
 */
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "nsm/core.hpp"
#include "nsm/field.hpp"
#include "nsm/io.hpp"
#include "nsm/profile.hpp"
#include "nsm/solver.hpp"

namespace nsm {

/// (phi, psi, zeta) = (rho, u, theta) - profile; E and b are copied
struct Perturbation {
    Grid1D grid;
    double t = 0.0;
    std::vector<double> phi, psi, zeta, E, b;
};

inline Perturbation perturb(const FieldState& s, const WaveProfile& prof) {
    if (!s.consistent()) throw NumericalError("perturb: state arrays do not match the grid");
    Perturbation d{s.grid, s.t, {}, {}, {}, s.E, s.b};
    const std::size_t n = s.size();
    d.phi.resize(n);
    d.psi.resize(n);
    d.zeta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FluidState h = prof.at(s.grid.x(i), s.t);
        d.phi[i] = s.rho[i] - h.rho;
        d.psi[i] = s.u[i] - h.u;
        d.zeta[i] = s.theta[i] - h.theta;
    }
    return d;
}

/// inverse of perturb
inline FieldState add_back(const Perturbation& d, const WaveProfile& prof) {
    FieldState s(d.grid, d.t);
    if (d.phi.size() != s.size()) throw NumericalError("add_back: perturbation does not match its grid");
    for (std::size_t i = 0; i < s.size(); ++i) {
        const FluidState h = prof.at(s.grid.x(i), d.t);
        s.rho[i] = h.rho + d.phi[i];
        s.u[i] = h.u + d.psi[i];
        s.theta[i] = h.theta + d.zeta[i];
    }
    s.E = d.E;
    s.b = d.b;
    return s;
}

/// Phi(s) = s - 1 - ln s, computed without cancellation near s = 1
inline double Phi(double s) {
    if (!(s > 0.0)) throw DomainError("Phi: argument must be positive");
    return (s - 1.0) - std::log1p(s - 1.0);
}

/// eta = psi^2/2 + R theta_hat Phi(rho_hat/rho) + R/(gamma-1) theta_hat Phi(theta/theta_hat)
inline double energy_density(const GasParams& p, const FluidState& s, const FluidState& hat) {
    if (!(s.rho > 0.0) || !(s.theta > 0.0) || !(hat.rho > 0.0) || !(hat.theta > 0.0))
        throw DomainError("energy_density: densities and temperatures must be positive");
    const double psi = s.u - hat.u;
    return 0.5 * psi * psi + p.R * hat.theta * Phi(hat.rho / s.rho) +
           p.R / (p.gamma - 1.0) * hat.theta * Phi(s.theta / hat.theta);
}

inline double trapezoid(const std::vector<double>& f, double dx) {
    if (f.empty()) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return f.size() == 1 ? 0.0 : s * dx;
}

/// int rho eta dx
inline double total_energy(const GasParams& p, const FieldState& s, const WaveProfile& prof) {
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        f[i] = s.rho[i] * energy_density(p, {s.rho[i], s.u[i], s.theta[i]}, prof.at(s.grid.x(i), s.t));
    return trapezoid(f, s.grid.dx());
}

/// int (E + psi b + u_hat b)^2 dx
inline double compound_dissipation(const FieldState& s, const WaveProfile& prof) {
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double uh = prof.at(s.grid.x(i), s.t).u;
        const double psi = s.u[i] - uh;
        const double j = s.E[i] + psi * s.b[i] + uh * s.b[i];
        f[i] = j * j;
    }
    return trapezoid(f, s.grid.dx());
}

/// 1/2 int (eps E^2 + b^2) dx
inline double em_energy(const GasParams& p, const FieldState& s) {
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) f[i] = 0.5 * (p.epsilon * s.E[i] * s.E[i] + s.b[i] * s.b[i]);
    return trapezoid(f, s.grid.dx());
}

/// centred differences inside, one-sided at the ends
inline std::vector<double> derivative(const std::vector<double>& f, double dx) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (f[1] - f[0]) / dx;
    d[n - 1] = (f[n - 1] - f[n - 2]) / dx;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    return d;
}

struct Norms {
    double l2 = 0.0;
    double h1 = 0.0;
    double sup = 0.0;
};

inline Norms norms(const std::vector<double>& f, double dx) {
    Norms n;
    if (f.size() < 3) throw DomainError("norms: need at least 3 nodes");
    std::vector<double> sq(f.size()), dsq(f.size());
    const auto d = derivative(f, dx);
    for (std::size_t i = 0; i < f.size(); ++i) {
        sq[i] = f[i] * f[i];
        dsq[i] = d[i] * d[i];
        n.sup = std::max(n.sup, std::abs(f[i]));
    }
    const double l2sq = trapezoid(sq, dx);
    n.l2 = std::sqrt(l2sq);
    n.h1 = std::sqrt(l2sq + trapezoid(dsq, dx));
    return n;
}

/// norms of (phi, psi, zeta, E, b), in that order
inline std::array<Norms, 5> norms(const Perturbation& d) {
    const double dx = d.grid.dx();
    return {norms(d.phi, dx), norms(d.psi, dx), norms(d.zeta, dx), norms(d.E, dx), norms(d.b, dx)};
}

/// root of the sum of squares of forward differences, int |D+ f|^2 over the cells
inline double forward_difference_norm(const std::vector<double>& f, double dx, std::size_t upto = SIZE_MAX) {
    double s = 0.0;
    const std::size_t m = std::min(upto, f.size() - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double g = (f[i + 1] - f[i]) / dx;
        s += g * g * dx;
    }
    return std::sqrt(s);
}

struct InequalityReport {
    std::size_t violations = 0;
    double max_excess = -std::numeric_limits<double>::infinity(); ///< max of lhs - rhs
};

/// @brief sup f^2 <= f(L)^2 + 2 ||f|| ||f_x|| at every node
///
/// Discrete form: trapezoid L2 norm and the forward-difference norm. It is exact on
/// the grid and reduces to the usual inequality for fields vanishing at x = L.
inline InequalityReport sobolev_check(const std::vector<double>& f, double dx, double slack = 1e-10) {
    InequalityReport r;
    std::vector<double> sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
    const double l2 = std::sqrt(trapezoid(sq, dx));
    const double rhs = f.back() * f.back() + 2.0 * l2 * forward_difference_norm(f, dx);
    for (double v : f) {
        const double ex = v * v - rhs;
        r.max_excess = std::max(r.max_excess, ex);
        if (ex > slack * std::max(1.0, rhs)) ++r.violations;
    }
    return r;
}

/// |z(x)| <= |z(0)| + sqrt(x) ||z_x||_{L2(0,x)} at every node
inline InequalityReport poincare_check(const std::vector<double>& z, double dx, double slack = 1e-10) {
    InequalityReport r;
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (i > 0) {
            const double g = (z[i] - z[i - 1]) / dx;
            acc += g * g * dx;
        }
        const double x = static_cast<double>(i) * dx;
        const double rhs = std::abs(z[0]) + std::sqrt(x) * std::sqrt(acc);
        const double ex = std::abs(z[i]) - rhs;
        r.max_excess = std::max(r.max_excess, ex);
        if (ex > slack * std::max(1.0, rhs)) ++r.violations;
    }
    return r;
}

/// the same check with the full-domain derivative norm, as the inequality is usually stated
inline InequalityReport poincare_check_global(const std::vector<double>& z, double dx, double slack = 1e-10) {
    InequalityReport r;
    const double dn = forward_difference_norm(z, dx);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double rhs = std::abs(z[0]) + std::sqrt(static_cast<double>(i) * dx) * dn;
        const double ex = std::abs(z[i]) - rhs;
        r.max_excess = std::max(r.max_excess, ex);
        if (ex > slack * std::max(1.0, rhs)) ++r.violations;
    }
    return r;
}

/// random smooth field: a few random Fourier modes times an optional envelope
inline std::vector<double> random_smooth_field(std::mt19937_64& rng, std::size_t n, double L, bool vanish_right) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> modes(1, 6);
    const int m = modes(rng);
    std::vector<double> a(static_cast<std::size_t>(m)), k(a.size()), ph(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        a[j] = U(rng);
        k[j] = (1.0 + 4.0 * (U(rng) + 1.0)) * std::numbers::pi / L;
        ph[j] = std::numbers::pi * U(rng);
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = L * static_cast<double>(i) / static_cast<double>(n - 1);
        double v = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) v += a[j] * std::sin(k[j] * x + ph[j]);
        f[i] = vanish_right ? v * (1.0 - x / L) : v;
    }
    if (vanish_right) f.back() = 0.0;
    return f;
}

/// time-stamped measurements at one record
struct DiagRecord {
    double t = 0.0;
    std::array<Norms, 5> norm{}; ///< phi, psi, zeta, E, b
    double energy = 0.0;          ///< int rho eta dx
    double em_energy = 0.0;       ///< 1/2 int (eps E^2 + b^2) dx
    double dissipation = 0.0;     ///< int (E + psi b + u_hat b)^2 dx at t
    double dissipation_integral = 0.0; ///< int_0^t int (E + u b)^2 dx ds
    double boundary_em_integral = 0.0; ///< int_0^t sqrt(eps) E(0,s)^2 ds
    double phi0 = 0.0, E0 = 0.0, b0 = 0.0;
    double boundary_identity = 0.0; ///< |sqrt(eps) E(0) - b(0)|
    double mass_residual = 0.0;     ///< control-volume mass balance, relative to |rho_+ u_+| per unit time
    std::size_t band_violations = 0;

    [[nodiscard]] double sup_fluid() const { return std::max({norm[0].sup, norm[1].sup, norm[2].sup}); }
    [[nodiscard]] double sup_em() const { return std::max(norm[3].sup, norm[4].sup); }
};

/// mass bookkeeping for the control-volume balance
struct MassLedger {
    double initial = 0.0;
    double flux_scale = 1.0; ///< |rho_+ u_+|, or 1 if zero
};

inline DiagRecord make_record(const GasParams& p, const FieldState& s, const WaveProfile& prof,
                              const RunAccumulators& acc, const MassLedger& mass, const EndStates& end) {
    DiagRecord r;
    r.t = s.t;
    const Perturbation d = perturb(s, prof);
    r.norm = norms(d);
    r.energy = total_energy(p, s, prof);
    r.em_energy = em_energy(p, s);
    r.dissipation = compound_dissipation(s, prof);
    r.dissipation_integral = acc.dissipation;
    r.boundary_em_integral = acc.boundary_em;
    r.phi0 = d.phi[0];
    r.E0 = s.E[0];
    r.b0 = s.b[0];
    r.boundary_identity = std::abs(std::sqrt(p.epsilon) * s.E[0] - s.b[0]);
    const double balance = interior_mass(s) - mass.initial + (acc.mass_flux_right - acc.mass_flux_left);
    r.mass_residual = std::abs(balance) / (mass.flux_scale * std::max(1.0, s.t));
    r.band_violations = check_pointwise_bounds(p, s, end).size();
    return r;
}

inline void write_record_header(std::ostream& os) {
    os << "t";
    for (const char* c : {"phi", "psi", "zeta", "E", "b"}) os << ',' << c << "_l2," << c << "_h1," << c << "_sup";
    os << ",energy,em_energy,dissipation,dissipation_integral,boundary_em_integral,phi0,E0,b0,"
          "boundary_identity,mass_residual,band_violations\n";
}

inline void write_record(std::ostream& os, const DiagRecord& r) {
    os << io::fmt17(r.t);
    for (const auto& n : r.norm) os << ',' << io::fmt17(n.l2) << ',' << io::fmt17(n.h1) << ',' << io::fmt17(n.sup);
    for (double v : {r.energy, r.em_energy, r.dissipation, r.dissipation_integral, r.boundary_em_integral, r.phi0,
                     r.E0, r.b0, r.boundary_identity, r.mass_residual})
        os << ',' << io::fmt17(v);
    os << ',' << r.band_violations << '\n';
}

enum class Trend { decreasing, not_decreasing, inconclusive };

inline const char* to_string(Trend t) {
    switch (t) {
    case Trend::decreasing: return "decreasing";
    case Trend::not_decreasing: return "not_decreasing";
    case Trend::inconclusive: return "inconclusive";
    }
    return "?";
}

struct ComponentVerdict {
    Trend trend = Trend::inconclusive;
    double first_quartile = 0.0;
    double last_quartile = 0.0;
    double rate = 0.0; ///< least-squares rate of ln(sup) against t
};

struct ConvergenceReport {
    bool conclusive = false;
    std::array<ComponentVerdict, 5> component{}; ///< phi, psi, zeta, E, b
    [[nodiscard]] bool all_decreasing() const {
        if (!conclusive) return false;
        return std::all_of(component.begin(), component.end(),
                           [](const ComponentVerdict& c) { return c.trend == Trend::decreasing; });
    }
};

/// @brief decay verdicts on the sup-norms of the five perturbation components
///
/// A component passes when its last-quartile mean is at most half its first-quartile
/// mean, or at most 1.1 times the supplied floor (a zero-perturbation run).
inline ConvergenceReport fit_convergence(const std::vector<DiagRecord>& recs,
                                         std::optional<std::array<double, 5>> floor = std::nullopt) {
    ConvergenceReport rep;
    if (recs.size() < 10) return rep;
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
    for (const auto& r : recs)
        if (r.t > 0.0) {
            tmin = std::min(tmin, r.t);
            tmax = std::max(tmax, r.t);
        }
    if (!(tmax >= 10.0 * tmin)) return rep;
    rep.conclusive = true;
    const std::size_t n = recs.size(), q = std::max<std::size_t>(1, n / 4);
    for (std::size_t c = 0; c < 5; ++c) {
        ComponentVerdict v;
        for (std::size_t i = 0; i < q; ++i) {
            v.first_quartile += recs[i].norm[c].sup;
            v.last_quartile += recs[n - 1 - i].norm[c].sup;
        }
        v.first_quartile /= static_cast<double>(q);
        v.last_quartile /= static_cast<double>(q);
        const bool halved = v.last_quartile <= 0.5 * v.first_quartile;
        const bool at_floor = floor && v.last_quartile <= 1.1 * (*floor)[c];
        v.trend = (halved || at_floor) ? Trend::decreasing : Trend::not_decreasing;
        std::vector<double> xs, ys;
        for (const auto& r : recs)
            if (r.norm[c].sup > 0.0) {
                xs.push_back(r.t);
                ys.push_back(std::log(r.norm[c].sup));
            }
        if (xs.size() >= 2) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= static_cast<double>(xs.size());
            my /= static_cast<double>(xs.size());
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sxx += (xs[i] - mx) * (xs[i] - mx);
                sxy += (xs[i] - mx) * (ys[i] - my);
            }
            v.rate = sxx > 0.0 ? -sxy / sxx : 0.0;
        }
        rep.component[c] = v;
    }
    return rep;
}

} // namespace nsm
