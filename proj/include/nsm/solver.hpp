#pragma once
/**
 * @brief Finite-difference solver for the half-line outflow problem.
 *
 * Nodes x_i = i dx, i = 0..N. Fluid: conservative upwind mass flux, upwind
 * convection, central pressure gradient and diffusion. Maxwell part: the Riemann
 * invariants W1 (speed +1/sqrt(eps)) and W2 (speed -1/sqrt(eps)) are upwinded and
 * mapped back to (E, b). The stiff -E/eps term is either integrated exactly
 * (integrating factor) or explicitly. Time stepping is the two-stage SSP
 * Runge-Kutta scheme; boundary values are reset after every stage.
 */
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "nsm/core.hpp"
#include "nsm/field.hpp"
#include "nsm/io.hpp"

namespace nsm {

enum class SourceTreatment { integrating_factor, explicit_rk };
enum class FarField { dirichlet, sponge };
/// coupled: the full system; relaxation: eps E_t + E = 0, b_t = 0, no Lorentz force, E^2 heating
enum class MaxwellModel { coupled, relaxation };

inline const char* to_string(SourceTreatment s) {
    return s == SourceTreatment::integrating_factor ? "integrating_factor" : "explicit";
}
inline const char* to_string(FarField f) { return f == FarField::dirichlet ? "dirichlet" : "sponge"; }
inline const char* to_string(MaxwellModel m) { return m == MaxwellModel::coupled ? "coupled" : "relaxation"; }

struct SolverConfig {
    double cfl = 0.9;
    double T = 1.0;
    /// snapshot / diagnostics cadence; 0 records only the initial and final states
    double cadence = 0.0;
    /// when positive, records are instead log-spaced: 0, then record_count times from record_first to T
    int record_count = 0;
    double record_first = 1.0;
    FarField far_field = FarField::dirichlet;
    double sponge_fraction = 0.1; ///< width of the sponge layer relative to L
    double sponge_rate = 1.0;     ///< peak relaxation rate at x = L
    SourceTreatment source = SourceTreatment::integrating_factor;
    /// with the explicit source, dt is also limited to this multiple of eps
    double explicit_source_factor = 0.02;
    MaxwellModel maxwell = MaxwellModel::coupled;
    int rho_extrapolation_order = 1;
    /// keep (rho, u, theta) fixed in time (Maxwell-only tests)
    bool freeze_fluid = false;
    double max_dt = std::numeric_limits<double>::infinity();
    double min_dt = 1e-14;

    [[nodiscard]] std::vector<std::string> violations() const {
        std::vector<std::string> v;
        if (!(cfl > 0.0 && cfl <= 1.0)) v.emplace_back("cfl must lie in (0, 1]");
        if (!(T >= 0.0)) v.emplace_back("T must be non-negative");
        if (!(cadence >= 0.0)) v.emplace_back("cadence must be non-negative");
        if (record_count < 0) v.emplace_back("record_count must be non-negative");
        if (record_count > 0 && !(record_first > 0.0 && record_first <= T))
            v.emplace_back("record_first must lie in (0, T]");
        if (!(sponge_fraction > 0.0 && sponge_fraction < 1.0)) v.emplace_back("sponge_fraction must lie in (0, 1)");
        if (!(sponge_rate >= 0.0)) v.emplace_back("sponge_rate must be non-negative");
        if (!(explicit_source_factor > 0.0)) v.emplace_back("explicit_source_factor must be positive");
        if (rho_extrapolation_order != 0 && rho_extrapolation_order != 1)
            v.emplace_back("rho_extrapolation_order must be 0 or 1");
        if (!(max_dt > 0.0)) v.emplace_back("max_dt must be positive");
        return v;
    }

    /// record times 0, cadence, 2 cadence, ..., T (or the log-spaced set)
    [[nodiscard]] std::vector<double> record_times() const {
        std::vector<double> r{0.0};
        if (record_count > 0 && T > 0.0) {
            const double a = std::log(record_first), b = std::log(T);
            for (int k = 0; k < record_count; ++k) {
                const double t = record_count == 1 ? T : std::exp(a + (b - a) * k / (record_count - 1.0));
                if (t > r.back()) r.push_back(k + 1 == record_count ? T : t);
            }
            return r;
        }
        if (cadence > 0.0) {
            for (std::size_t k = 1;; ++k) {
                const double t = static_cast<double>(k) * cadence;
                if (t >= T * (1.0 - 1e-12)) break;
                r.push_back(t);
            }
        }
        if (T > 0.0) r.push_back(T);
        return r;
    }
};

/// default truncation length: the fan never reaches x = L before T
inline double default_domain_length(const GasParams& p, const FluidState& far, double T) {
    return std::max(40.0, 2.0 * lambda3(p, far) * (1.0 + T));
}

/// time derivatives of the non-stiff part at every node
struct Rates {
    std::vector<double> rho, u, theta, E, b;
    double flux_left = 0.0;  ///< numerical mass flux through the face x_{1/2}
    double flux_right = 0.0; ///< numerical mass flux through the face x_{N-1/2}
};

struct StepInfo {
    double dt = 0.0;
    double dt_bound = 0.0;
    int retries = 0;
};

/// running integrals over accepted steps
struct RunAccumulators {
    double mass_flux_left = 0.0;  ///< int F_{1/2} dt
    double mass_flux_right = 0.0; ///< int F_{N-1/2} dt
    double dissipation = 0.0;     ///< int int (E + u b)^2 dx dt
    double boundary_em = 0.0;     ///< int sqrt(eps) E(0,t)^2 dt
    std::size_t steps = 0;
    std::size_t retries = 0;
    double max_dt_ratio = 0.0;    ///< max over accepted steps of dt / bound
};

class Solver {
  public:
    Solver(const GasParams& p, const EndStates& end, const SolverConfig& cfg) : p_(p), end_(end), cfg_(cfg) {
        p_.validate();
        auto v = end_.violations();
        if (!v.empty()) throw ConfigError(v.front());
        if (!(end_.u_minus < 0.0)) throw ConfigError("u_minus must be negative (outflow problem)");
        auto c = cfg_.violations();
        if (!c.empty()) throw ConfigError(c.front());
    }

    [[nodiscard]] const GasParams& params() const { return p_; }
    [[nodiscard]] const EndStates& end_states() const { return end_; }
    [[nodiscard]] const SolverConfig& config() const { return cfg_; }
    [[nodiscard]] const RunAccumulators& accumulators() const { return acc_; }
    void reset_accumulators() { acc_ = {}; }

    /// Dirichlet fluid data, extrapolated density and the characteristic Maxwell conditions
    void apply_boundary(FieldState& s) const {
        const std::size_t N = s.size() - 1;
        s.u[0] = end_.u_minus;
        s.theta[0] = end_.theta_minus;
        double r0 = s.rho[1];
        if (cfg_.rho_extrapolation_order == 1) {
            const double lin = 2.0 * s.rho[1] - s.rho[2];
            if (lin > 0.0) r0 = lin;
        }
        s.rho[0] = r0;
        s.rho[N] = end_.rho_plus;
        s.u[N] = end_.u_plus;
        s.theta[N] = end_.theta_plus;
        if (cfg_.maxwell == MaxwellModel::coupled) {
            const double se = std::sqrt(p_.epsilon);
            // x = 0: W1 = 0 is incoming, keep the outgoing W2
            const RiemannPair w0 = to_riemann(p_, s.E[0], s.b[0]);
            s.E[0] = w0.w2 / p_.epsilon;
            s.b[0] = se * s.E[0];
            // x = L: W2 = 0 is incoming, keep the outgoing W1
            const RiemannPair wn = to_riemann(p_, s.E[N], s.b[N]);
            s.E[N] = wn.w1 / p_.epsilon;
            s.b[N] = -wn.w1 / se;
        }
    }

    [[nodiscard]] Rates spatial_rhs(const FieldState& s) const {
        const std::size_t n = s.size(), N = n - 1;
        const double dx = s.grid.dx();
        const double R = p_.R, g = p_.gamma, mu = p_.mu, kap = p_.kappa, eps = p_.epsilon;
        const double cv = R / (g - 1.0);
        Rates r;
        r.rho.assign(n, 0.0);
        r.u.assign(n, 0.0);
        r.theta.assign(n, 0.0);
        r.E.assign(n, 0.0);
        r.b.assign(n, 0.0);
        const bool coupled = cfg_.maxwell == MaxwellModel::coupled;

        std::vector<double> flux(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double uf = 0.5 * (s.u[i] + s.u[i + 1]);
            flux[i] = uf * (uf > 0.0 ? s.rho[i] : s.rho[i + 1]);
        }
        r.flux_left = flux[0];
        r.flux_right = flux[N - 1];

        if (!cfg_.freeze_fluid) {
            for (std::size_t i = 1; i < N; ++i) {
                const double rho = s.rho[i], u = s.u[i], th = s.theta[i];
                const double ux = (s.u[i + 1] - s.u[i - 1]) / (2.0 * dx);
                const double uxx = (s.u[i + 1] - 2.0 * u + s.u[i - 1]) / (dx * dx);
                const double txx = (s.theta[i + 1] - 2.0 * th + s.theta[i - 1]) / (dx * dx);
                const double px = R * (s.rho[i + 1] * s.theta[i + 1] - s.rho[i - 1] * s.theta[i - 1]) / (2.0 * dx);
                const double u_up = u > 0.0 ? (u - s.u[i - 1]) / dx : (s.u[i + 1] - u) / dx;
                const double t_up = u > 0.0 ? (th - s.theta[i - 1]) / dx : (s.theta[i + 1] - th) / dx;
                const double j = coupled ? s.E[i] + u * s.b[i] : s.E[i];
                const double lorentz = coupled ? j * s.b[i] : 0.0;
                r.rho[i] = -(flux[i] - flux[i - 1]) / dx;
                r.u[i] = -u * u_up + (-px + mu * uxx - lorentz) / rho;
                r.theta[i] = -u * t_up + (-R * rho * th * ux + mu * ux * ux + kap * txx + j * j) / (cv * rho);
            }
        }

        if (coupled) {
            const double se = std::sqrt(eps), lam = 1.0 / se;
            std::vector<double> w1(n), w2(n);
            for (std::size_t i = 0; i < n; ++i) {
                const RiemannPair w = to_riemann(p_, s.E[i], s.b[i]);
                w1[i] = w.w1;
                w2[i] = w.w2;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double half_ub = 0.5 * s.u[i] * s.b[i];
                double n1 = 0.0, n2 = 0.0;
                if (i > 0) n1 = -lam * (w1[i] - w1[i - 1]) / dx - half_ub;
                if (i < N) n2 = lam * (w2[i + 1] - w2[i]) / dx - half_ub;
                if (i == 0) n1 = 0.0; // W1(0) is prescribed
                if (i == N) n2 = 0.0; // W2(L) is prescribed
                r.E[i] = (n1 + n2) / eps;
                r.b[i] = (n2 - n1) / se;
            }
        }
        if (cfg_.source == SourceTreatment::explicit_rk)
            for (std::size_t i = 0; i < n; ++i) r.E[i] -= s.E[i] / eps;

        if (cfg_.far_field == FarField::sponge && !cfg_.freeze_fluid) {
            const double L = s.grid.L, x0 = L * (1.0 - cfg_.sponge_fraction);
            for (std::size_t i = 1; i < N; ++i) {
                const double x = s.grid.x(i);
                if (x <= x0) continue;
                const double z = (x - x0) / (L - x0);
                const double sig = cfg_.sponge_rate * z * z;
                r.rho[i] -= sig * (s.rho[i] - end_.rho_plus);
                r.u[i] -= sig * (s.u[i] - end_.u_plus);
                r.theta[i] -= sig * (s.theta[i] - end_.theta_plus);
            }
        }
        return r;
    }

    /// the CFL / diffusion bound on dt for the state
    [[nodiscard]] double stable_dt(const FieldState& s) const {
        const double dx = s.grid.dx();
        double smax = cfg_.maxwell == MaxwellModel::coupled ? 1.0 / std::sqrt(p_.epsilon) : 0.0;
        double nu = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            smax = std::max(smax, std::abs(s.u[i]) + sound_speed(p_, s.theta[i]));
            nu = std::max({nu, p_.mu / s.rho[i], p_.kappa * (p_.gamma - 1.0) / (p_.R * s.rho[i])});
        }
        double dt = cfg_.cfl * std::min(dx / smax, dx * dx / (2.0 * nu));
        if (cfg_.source == SourceTreatment::explicit_rk) dt = std::min(dt, cfg_.explicit_source_factor * p_.epsilon);
        return std::min(dt, cfg_.max_dt);
    }

    /// one accepted step of at most dt_limit; retries with halved dt when positivity is lost
    StepInfo step(FieldState& s, double dt_limit = std::numeric_limits<double>::infinity()) {
        if (!s.consistent()) throw NumericalError("step: inconsistent field arrays");
        StepInfo info;
        info.dt_bound = stable_dt(s);
        double dt = std::min(info.dt_bound, dt_limit);
        for (;;) {
            if (dt < cfg_.min_dt) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "step: dt underflow at t = %.17g (dt = %.3g)", s.t, dt);
                throw NumericalError(buf);
            }
            FieldState next = s;
            double fl = 0.0, fr = 0.0;
            if (try_step(s, next, dt, fl, fr)) {
                accumulate(s, next, dt, fl, fr);
                acc_.max_dt_ratio = std::max(acc_.max_dt_ratio, dt / info.dt_bound);
                ++acc_.steps;
                s = std::move(next);
                info.dt = dt;
                return info;
            }
            ++info.retries;
            ++acc_.retries;
            dt *= 0.5;
        }
    }

    using Observer = std::function<void(const FieldState&)>;

    /// integrate to cfg.T, calling the observer at every record time (t = 0 included)
    void run(FieldState& s, const Observer& observe) {
        apply_boundary(s);
        const auto times = cfg_.record_times();
        std::size_t k = 0;
        const double t0 = s.t;
        for (; k < times.size() && times[k] <= t0; ++k) {
        }
        if (observe) observe(s);
        for (; k < times.size(); ++k) {
            const double target = times[k];
            while (s.t < target) {
                const double remaining = target - s.t;
                step(s, remaining);
                // land exactly on the record time
                if (target - s.t <= 1e-12 * std::max(1.0, target)) s.t = target;
            }
            if (observe) observe(s);
        }
    }

  private:
    bool try_step(const FieldState& s, FieldState& out, double dt, double& fl, double& fr) const {
        const std::size_t n = s.size();
        const bool IF = cfg_.source == SourceTreatment::integrating_factor;
        const double decay = IF ? std::exp(-dt / p_.epsilon) : 1.0;
        const Rates r0 = spatial_rhs(s);
        FieldState s1 = s;
        for (std::size_t i = 0; i < n; ++i) {
            s1.rho[i] = s.rho[i] + dt * r0.rho[i];
            s1.u[i] = s.u[i] + dt * r0.u[i];
            s1.theta[i] = s.theta[i] + dt * r0.theta[i];
            s1.E[i] = decay * (s.E[i] + dt * r0.E[i]);
            s1.b[i] = s.b[i] + dt * r0.b[i];
        }
        apply_boundary(s1);
        if (s1.first_nonpositive() != n) return false;
        const Rates r1 = spatial_rhs(s1);
        for (std::size_t i = 0; i < n; ++i) {
            out.rho[i] = 0.5 * s.rho[i] + 0.5 * (s1.rho[i] + dt * r1.rho[i]);
            out.u[i] = 0.5 * s.u[i] + 0.5 * (s1.u[i] + dt * r1.u[i]);
            out.theta[i] = 0.5 * s.theta[i] + 0.5 * (s1.theta[i] + dt * r1.theta[i]);
            out.E[i] = 0.5 * decay * s.E[i] + 0.5 * (s1.E[i] + dt * r1.E[i]);
            out.b[i] = 0.5 * s.b[i] + 0.5 * (s1.b[i] + dt * r1.b[i]);
        }
        out.t = s.t + dt;
        apply_boundary(out);
        if (out.first_nonpositive() != n) return false;
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(out.u[i]) || !std::isfinite(out.E[i]) || !std::isfinite(out.b[i])) return false;
        fl = 0.5 * (r0.flux_left + r1.flux_left);
        fr = 0.5 * (r0.flux_right + r1.flux_right);
        return true;
    }

    void accumulate(const FieldState& a, const FieldState& b, double dt, double fl, double fr) {
        acc_.mass_flux_left += dt * fl;
        acc_.mass_flux_right += dt * fr;
        const bool coupled = cfg_.maxwell == MaxwellModel::coupled;
        auto diss = [&](const FieldState& s) {
            const double dx = s.grid.dx();
            double sum = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double j = coupled ? s.E[i] + s.u[i] * s.b[i] : s.E[i];
                const double w = (i == 0 || i + 1 == s.size()) ? 0.5 : 1.0;
                sum += w * j * j;
            }
            return sum * dx;
        };
        acc_.dissipation += 0.5 * dt * (diss(a) + diss(b));
        const double se = std::sqrt(p_.epsilon);
        acc_.boundary_em += 0.5 * dt * se * (a.E[0] * a.E[0] + b.E[0] * b.E[0]);
    }

    GasParams p_;
    EndStates end_;
    SolverConfig cfg_;
    RunAccumulators acc_;
};

/// interior control-volume mass dx * sum_{i=1}^{N-1} rho_i
inline double interior_mass(const FieldState& s) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) m += s.rho[i];
    return m * s.grid.dx();
}

/// trapezoidal mass over [0, L]
inline double trapezoid_mass(const FieldState& s) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) m += (i == 0 || i + 1 == s.size() ? 0.5 : 1.0) * s.rho[i];
    return m * s.grid.dx();
}

inline void write_snapshot_csv(std::ostream& os, const FieldState& s, bool header = true) {
    if (header) os << "t,x,rho,u,theta,E,b\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        io::write_row(os, {s.t, s.grid.x(i), s.rho[i], s.u[i], s.theta[i], s.E[i], s.b[i]});
}

} // namespace nsm
