#pragma once
/**
 * @brief Stationary boundary layer (rho~, u~, theta~)(x) connecting the boundary
 * data (u_-, theta_-) at x = 0 to a far state, for all three Mach regimes.
 *
 * With m = rho_+ u_+ the layer solves
 *   u_x     = (m/mu)    [(u - u_+) + R (theta/u - theta_+/u_+)]
 *   theta_x = (m/kappa) [R theta_+/u_+ (u - u_+) + R/(gamma-1) (theta - theta_+) - (u - u_+)^2 / 2]
 * and rho = m / u. Internally everything is written for the deviation
 * d = (u - u_+, theta - theta_+), which avoids cancellation near the fixed point.
 */
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nsm/core.hpp"
#include "nsm/interpolation.hpp"
#include "nsm/io.hpp"
#include "nsm/ode.hpp"
#include "nsm/profile.hpp"

namespace nsm {

using Vec2 = std::array<double, 2>;

enum class LayerCase { supersonic, transonic_manifold, transonic_degenerate, subsonic, nonexistent };

inline const char* to_string(LayerCase c) {
    switch (c) {
    case LayerCase::supersonic: return "supersonic";
    case LayerCase::transonic_manifold: return "transonic_manifold";
    case LayerCase::transonic_degenerate: return "transonic_degenerate";
    case LayerCase::subsonic: return "subsonic";
    case LayerCase::nonexistent: return "nonexistent";
    }
    return "?";
}

/// boundary values (u_-, theta_-) at x = 0
struct BoundaryData {
    double u = -1.0;
    double theta = 1.0;
};

inline double layer_strength(const FluidState& far, const BoundaryData& bd) {
    return std::abs(far.u - bd.u) + std::abs(far.theta - bd.theta);
}

inline Vec2 layer_ode_rhs(const GasParams& p, const FluidState& far, double u, double theta) {
    if (u == 0.0) throw NumericalError("layer_ode_rhs: singular at u = 0");
    if (far.u == 0.0) throw NumericalError("layer_ode_rhs: far-field velocity is zero");
    const double m = far.rho * far.u;
    const double du = u - far.u;
    return {(m / p.mu) * (du + p.R * (theta / u - far.theta / far.u)),
            (m / p.kappa) *
                (p.R * far.theta / far.u * du + p.R / (p.gamma - 1.0) * (theta - far.theta) - 0.5 * du * du)};
}

/// the same field in deviation variables d = (u - u_+, theta - theta_+)
inline Vec2 layer_ode_rhs_deviation(const GasParams& p, const FluidState& far, const Vec2& d) {
    const double u = far.u + d[0];
    if (u == 0.0) throw NumericalError("layer_ode_rhs: singular at u = 0");
    const double m = far.rho * far.u;
    // theta/u - theta_+/u_+ = (u_+ dtheta - theta_+ du) / (u u_+)
    const double ratio = (far.u * d[1] - far.theta * d[0]) / (u * far.u);
    return {(m / p.mu) * (d[0] + p.R * ratio),
            (m / p.kappa) * (p.R * far.theta / far.u * d[0] + p.R / (p.gamma - 1.0) * d[1] - 0.5 * d[0] * d[0])};
}

/// Jacobian of the layer ODE at the far state with its (real) eigen-decomposition
struct Linearization {
    std::array<std::array<double, 2>, 2> J{};
    double lambda_lo = 0.0; ///< smaller eigenvalue
    double lambda_hi = 0.0; ///< larger eigenvalue
    Vec2 v_lo{};            ///< unit eigenvector of lambda_lo
    Vec2 v_hi{};            ///< unit eigenvector of lambda_hi
    double mach = 0.0;

    /// stable eigenvalue of smallest magnitude (the rate of the slowest exponential mode)
    [[nodiscard]] double slowest_stable() const {
        if (lambda_hi < 0.0) return lambda_hi;
        return lambda_lo;
    }
};

namespace detail {

inline Vec2 unit(Vec2 v) {
    const double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
}

inline Vec2 eigenvector(const std::array<std::array<double, 2>, 2>& J, double lambda) {
    const Vec2 c1{J[0][1], lambda - J[0][0]};
    const Vec2 c2{lambda - J[1][1], J[1][0]};
    const Vec2 v = std::hypot(c1[0], c1[1]) >= std::hypot(c2[0], c2[1]) ? c1 : c2;
    Vec2 w = unit(v);
    if (w[0] < 0.0 || (w[0] == 0.0 && w[1] < 0.0)) w = {-w[0], -w[1]};
    return w;
}

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }
inline double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

} // namespace detail

inline Linearization linearize_layer(const GasParams& p, const FluidState& far) {
    p.validate();
    if (far.u == 0.0) throw NumericalError("linearize_layer: far-field velocity is zero, the layer ODE is singular");
    if (!(far.rho > 0.0) || !(far.theta > 0.0)) throw DomainError("linearize_layer: far state must be positive");
    const double m = far.rho * far.u;
    Linearization L;
    L.J[0][0] = (m / p.mu) * (1.0 - p.R * far.theta / (far.u * far.u));
    L.J[0][1] = (m / p.mu) * p.R / far.u;
    L.J[1][0] = (m / p.kappa) * p.R * far.theta / far.u;
    L.J[1][1] = (m / p.kappa) * p.R / (p.gamma - 1.0);
    const double tr = L.J[0][0] + L.J[1][1];
    const double det = L.J[0][0] * L.J[1][1] - L.J[0][1] * L.J[1][0];
    const double half_gap = 0.5 * (L.J[0][0] - L.J[1][1]);
    const double disc = half_gap * half_gap + L.J[0][1] * L.J[1][0];
    if (disc < 0.0) throw NumericalError("linearize_layer: complex eigenvalues");
    // the large root from the stable formula, the small one from det/large
    const double big = 0.5 * tr + std::copysign(std::sqrt(disc), tr == 0.0 ? 1.0 : tr);
    const double small = big != 0.0 ? det / big : 0.0;
    L.lambda_lo = std::min(big, small);
    L.lambda_hi = std::max(big, small);
    L.v_lo = detail::eigenvector(L.J, L.lambda_lo);
    L.v_hi = detail::eigenvector(L.J, L.lambda_hi);
    L.mach = std::abs(far.u) / sound_speed(p, far.theta);
    return L;
}

struct LayerOptions {
    double rtol = 1e-10;            ///< integrator relative tolerance
    double max_strength = 0.5;      ///< delta_0: larger strengths are reported nonexistent
    double sample_step = 0.02;      ///< uniform output spacing
    double tail_floor = 1e-9;       ///< exponential cases stop this close to the far state
    double algebraic_extent = 1e3;  ///< degenerate case stops once strength * x reaches this
    double geometric_from = 10.0;   ///< degenerate case switches to geometric spacing beyond this x
    double geometric_ratio = 0.01;  ///< relative spacing in the geometric part
    double manifold_offset = 0.0;   ///< fixed-point offset; 0 selects 1e-6 max(1, |u_+|)
    double reach_tol = 1e-8;        ///< subsonic data further than this from the stable manifold is rejected
    double x_limit = 1e7;
    std::optional<Regime> case_hint;

    [[nodiscard]] double offset(const FluidState& far) const {
        return manifold_offset > 0.0 ? manifold_offset : 1e-6 * std::max(1.0, std::abs(far.u));
    }
};

/// sampled layer with a monotone-cubic evaluator; immutable after construction
class LayerProfile final : public WaveProfile {
  public:
    LayerProfile() = default;

    LayerProfile(FluidState far, LayerCase tag, std::vector<double> x, std::vector<double> u,
                 std::vector<double> theta, std::string message = {})
        : far_(far), tag_(tag), x_(std::move(x)), u_(std::move(u)), theta_(std::move(theta)),
          message_(std::move(message)) {
        if (x_.empty() || x_.size() != u_.size() || x_.size() != theta_.size())
            throw std::invalid_argument("LayerProfile: sample arrays must be non-empty and equally long");
        mass_flux_ = far_.rho * far_.u;
        rho_.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!(u_[i] < 0.0)) throw DomainError("LayerProfile: u~ must stay negative");
            rho_[i] = mass_flux_ / u_[i];
        }
        strength_ = std::abs(u_.front() - far_.u) + std::abs(theta_.front() - far_.theta);
        if (x_.size() >= 2) {
            iu_ = MonotoneCubic(x_, u_);
            itheta_ = MonotoneCubic(x_, theta_);
        }
    }

    static LayerProfile nonexistent(FluidState far, double strength, std::string why) {
        LayerProfile p;
        p.far_ = far;
        p.tag_ = LayerCase::nonexistent;
        p.strength_ = strength;
        p.mass_flux_ = far.rho * far.u;
        p.message_ = std::move(why);
        return p;
    }

    [[nodiscard]] FluidState at(double x, double /*t*/) const override { return value(x); }
    [[nodiscard]] FluidState far() const override { return far_; }

    [[nodiscard]] FluidState value(double x) const {
        require();
        if (x_.size() < 2 || x >= x_.back()) return x_.size() < 2 ? FluidState{rho_[0], u_[0], theta_[0]} : far_;
        const double u = iu_(x);
        return {mass_flux_ / u, u, itheta_(x)};
    }

    /// (rho_x, u_x, theta_x) of the evaluator
    [[nodiscard]] FluidState slope(double x) const {
        require();
        if (x_.size() < 2 || x >= x_.back()) return {0.0, 0.0, 0.0};
        const double u = iu_(x);
        const double ux = iu_.derivative(x);
        return {-mass_flux_ * ux / (u * u), ux, itheta_.derivative(x)};
    }

    [[nodiscard]] bool exists() const { return tag_ != LayerCase::nonexistent; }
    [[nodiscard]] LayerCase tag() const { return tag_; }
    [[nodiscard]] double strength() const { return strength_; }
    [[nodiscard]] double mass_flux() const { return mass_flux_; }
    [[nodiscard]] const std::string& message() const { return message_; }
    [[nodiscard]] const std::vector<double>& xs() const { return x_; }
    [[nodiscard]] const std::vector<double>& us() const { return u_; }
    [[nodiscard]] const std::vector<double>& thetas() const { return theta_; }
    [[nodiscard]] const std::vector<double>& rhos() const { return rho_; }
    [[nodiscard]] double x_max() const { return x_.empty() ? 0.0 : x_.back(); }
    [[nodiscard]] BoundaryData boundary() const { return {u_.front(), theta_.front()}; }

    /// distance of the x = 0 sample from the requested boundary data
    double boundary_error = 0.0;

  private:
    void require() const {
        if (!exists()) throw NumericalError("layer profile does not exist: " + message_);
    }

    FluidState far_{};
    LayerCase tag_ = LayerCase::nonexistent;
    std::vector<double> x_, u_, theta_, rho_;
    double strength_ = 0.0;
    double mass_flux_ = 0.0;
    std::string message_;
    MonotoneCubic iu_, itheta_;
};

namespace detail {

inline ode::Tolerances layer_tolerances(const LayerOptions& o, double h) {
    ode::Tolerances t;
    t.rtol = o.rtol;
    t.atol = 1e-30;
    t.h_init = std::min(1e-3, h);
    t.h_max = h;
    t.norm_relative = true;
    return t;
}

inline LayerCase regime_case(Regime r) {
    switch (r) {
    case Regime::supersonic: return LayerCase::supersonic;
    case Regime::transonic: return LayerCase::transonic_manifold;
    case Regime::subsonic: return LayerCase::subsonic;
    }
    return LayerCase::nonexistent;
}

/// forward integration from the boundary data (attracting node or centre-stable side)
inline LayerProfile integrate_forward(const GasParams& p, const FluidState& far, const BoundaryData& bd,
                                      bool transonic, const LayerOptions& o) {
    const double h = o.sample_step;
    const Vec2 y0{bd.u - far.u, bd.theta - far.theta};
    const double n0 = norm(y0);
    const double strength = layer_strength(far, bd);
    auto rhs = [&](const Vec2& d) { return layer_ode_rhs_deviation(p, far, d); };
    auto st = ode::make_dopri5<2>(rhs, 0.0, y0, layer_tolerances(o, h));
    std::vector<double> xs{0.0}, us{bd.u}, ths{bd.theta};
    double x = 0.0;
    try {
        for (;;) {
            double dx = h;
            if (transonic && x >= o.geometric_from) dx = std::max(h, o.geometric_ratio * x);
            x += dx;
            st.set_max_step(std::max(h, dx));
            st.advance_to(x);
            const Vec2 y = st.y();
            const double n = norm(y);
            if (!std::isfinite(n) || far.u + y[0] >= 0.0 || far.theta + y[1] <= 0.0 || n > 10.0 * n0)
                return LayerProfile::nonexistent(far, strength,
                                                 "trajectory from the boundary data leaves the far state");
            xs.push_back(x);
            us.push_back(far.u + y[0]);
            ths.push_back(far.theta + y[1]);
            if (n <= o.tail_floor)
                return {far, transonic ? LayerCase::transonic_manifold : LayerCase::supersonic, std::move(xs),
                        std::move(us), std::move(ths)};
            if (transonic && strength * x >= o.algebraic_extent)
                return {far, LayerCase::transonic_degenerate, std::move(xs), std::move(us), std::move(ths)};
            if (x > o.x_limit)
                return LayerProfile::nonexistent(far, strength, "trajectory did not reach the far state");
        }
    } catch (const NumericalError& e) {
        return LayerProfile::nonexistent(far, strength, std::string("integration failed: ") + e.what());
    }
}

/// one sweep along a branch of the stable manifold in reversed x
struct SweepResult {
    double s_best = 0.0;
    double dist = std::numeric_limits<double>::infinity();
};

template <class Rev>
SweepResult sweep_branch(const Rev& rev, const Vec2& y0, const Vec2& target, double h, double s_limit,
                         const FluidState& far, const LayerOptions& o) {
    const ode::Tolerances tol = layer_tolerances(o, h);
    auto st = ode::make_dopri5<2>(rev, 0.0, y0, tol);
    std::vector<double> ss{0.0};
    std::vector<Vec2> ys{y0};
    const double nstar = norm(target);
    std::size_t kb = 0;
    double best = dist(y0, target);
    try {
        for (;;) {
            const double s = ss.back() + h;
            st.advance_to(s);
            const Vec2 y = st.y();
            if (!std::isfinite(norm(y)) || far.u + y[0] >= 0.0 || far.theta + y[1] <= 0.0) break;
            ss.push_back(s);
            ys.push_back(y);
            const double d = dist(y, target);
            if (d < best) {
                best = d;
                kb = ys.size() - 1;
            }
            if (norm(y) > 2.0 * nstar + 10.0 * norm(y0) || s > s_limit) break;
        }
    } catch (const NumericalError&) {
    }
    // golden-section refinement of the closest approach between neighbouring samples
    const std::size_t k0 = kb > 0 ? kb - 1 : 0;
    const double a0 = ss[k0];
    const double b0 = ss[std::min(kb + 1, ss.size() - 1)];
    auto eval = [&](double s) {
        auto sub = ode::make_dopri5<2>(rev, a0, ys[k0], tol);
        sub.advance_to(s);
        return dist(sub.y(), target);
    };
    SweepResult r{ss[kb], best};
    if (b0 > a0) {
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = a0, b = b0;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = eval(c), fd = eval(d);
        for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, b); ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = eval(d);
            }
        }
        const double sm = fc < fd ? c : d;
        const double fm = std::min(fc, fd);
        if (fm < r.dist) r = {sm, fm};
    }
    return r;
}

inline LayerProfile integrate_saddle(const GasParams& p, const FluidState& far, const BoundaryData& bd,
                                     const Linearization& lin, const LayerOptions& o) {
    const double strength = layer_strength(far, bd);
    if (!(lin.lambda_lo < 0.0 && lin.lambda_hi > 0.0))
        throw NumericalError("subsonic layer: far state is not a saddle of the layer ODE");
    const double lam = lin.lambda_lo;
    const Vec2 vs = lin.v_lo;
    const double h = o.sample_step;
    const double eps = o.offset(far);
    const Vec2 target{bd.u - far.u, bd.theta - far.theta};
    auto rev = [&](const Vec2& d) {
        const Vec2 f = layer_ode_rhs_deviation(p, far, d);
        return Vec2{-f[0], -f[1]};
    };
    const double s_limit = std::max(1e3, 100.0 / std::abs(lam));

    SweepResult best;
    int sigma_best = 1;
    for (int sigma : {1, -1}) {
        const Vec2 y0{sigma * eps * vs[0], sigma * eps * vs[1]};
        const SweepResult r = sweep_branch(rev, y0, target, h, s_limit, far, o);
        if (r.dist < best.dist) {
            best = r;
            sigma_best = sigma;
        }
    }
    if (!(best.dist <= o.reach_tol * std::max(1.0, norm(target)))) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "boundary data is %.3g away from the stable manifold", best.dist);
        return LayerProfile::nonexistent(far, strength, buf);
    }

    // second pass: outputs on x = j h, x = s* - s
    const Vec2 y0{sigma_best * eps * vs[0], sigma_best * eps * vs[1]};
    const double s_star = best.s_best;
    const auto K = static_cast<std::size_t>(std::floor(s_star / h));
    auto st = ode::make_dopri5<2>(rev, 0.0, y0, layer_tolerances(o, h));
    std::vector<Vec2> rev_samples(K + 1);
    for (std::size_t jj = 0; jj <= K; ++jj) {
        const std::size_t j = K - jj;
        const double s = s_star - static_cast<double>(j) * h;
        if (s > 0.0) st.advance_to(s);
        rev_samples[j] = s > 0.0 ? st.y() : y0;
    }
    std::vector<double> xs, us, ths;
    for (std::size_t j = 0; j <= K; ++j) {
        xs.push_back(static_cast<double>(j) * h);
        us.push_back(far.u + rev_samples[j][0]);
        ths.push_back(far.theta + rev_samples[j][1]);
    }
    // linear tail between the manifold offset and the floor
    for (std::size_t j = K + 1;; ++j) {
        const double x = static_cast<double>(j) * h;
        const double a = std::exp(lam * (x - s_star));
        const Vec2 y{y0[0] * a, y0[1] * a};
        xs.push_back(x);
        us.push_back(far.u + y[0]);
        ths.push_back(far.theta + y[1]);
        if (norm(y) <= o.tail_floor || x > o.x_limit) break;
    }
    LayerProfile prof(far, LayerCase::subsonic, std::move(xs), std::move(us), std::move(ths));
    prof.boundary_error = dist(rev_samples[0], target);
    return prof;
}

} // namespace detail

/// @brief build the layer from (u_-, theta_-) at x = 0 to the far state
///
/// Supersonic and transonic far states attract from the boundary side, so the
/// trajectory is integrated forward from the data. Subsonic far states are saddles:
/// the data must lie on the stable manifold, which is swept backward from the fixed
/// point until it passes through the data.
inline LayerProfile construct_layer(const GasParams& p, const FluidState& far, const BoundaryData& bd,
                                    const LayerOptions& o = {}) {
    p.validate();
    if (far.u == 0.0) throw NumericalError("construct_layer: far-field velocity is zero, the layer ODE is singular");
    if (!(far.rho > 0.0) || !(far.theta > 0.0)) throw DomainError("construct_layer: far state must be positive");
    if (!(bd.u < 0.0)) throw DomainError("construct_layer: u_minus must be negative (outflow)");
    if (!(bd.theta > 0.0)) throw DomainError("construct_layer: theta_minus must be positive");
    const double strength = layer_strength(far, bd);
    if (far.u > 0.0)
        return LayerProfile::nonexistent(far, strength, "no outflow layer toward a far state with u_+ > 0");
    if (strength > o.max_strength)
        return LayerProfile::nonexistent(far, strength, "strength exceeds the configured delta_0");

    const Regime regime = o.case_hint ? *o.case_hint : classify_regime(p, far).tag;
    if (strength == 0.0) {
        return {far, detail::regime_case(regime), {0.0, 1.0}, {far.u, far.u}, {far.theta, far.theta}};
    }
    switch (regime) {
    case Regime::supersonic: return detail::integrate_forward(p, far, bd, false, o);
    case Regime::transonic: return detail::integrate_forward(p, far, bd, true, o);
    case Regime::subsonic: return detail::integrate_saddle(p, far, bd, linearize_layer(p, far), o);
    }
    throw NumericalError("construct_layer: unknown regime");
}

inline LayerProfile construct_layer(const GasParams& p, const EndStates& e, const LayerOptions& o = {}) {
    return construct_layer(p, e.layer_far(), BoundaryData{e.u_minus, e.theta_minus}, o);
}

/// quadratic coefficient of the centre dynamics xi' = a xi^2 along the centre eigenvector
inline double centre_coefficient(const GasParams& p, const FluidState& far, const Linearization& lin) {
    const bool lo_is_centre = std::abs(lin.lambda_lo) < std::abs(lin.lambda_hi);
    const double lc = lo_is_centre ? lin.lambda_lo : lin.lambda_hi;
    const Vec2 v = lo_is_centre ? lin.v_lo : lin.v_hi;
    const Vec2 l{lin.J[1][0], lc - lin.J[0][0]}; // left eigenvector
    const double xi = 1e-4;
    const Vec2 fp = layer_ode_rhs_deviation(p, far, {xi * v[0], xi * v[1]});
    const Vec2 fm = layer_ode_rhs_deviation(p, far, {-xi * v[0], -xi * v[1]});
    const double even = 0.5 * (l[0] * (fp[0] + fm[0]) + l[1] * (fp[1] + fm[1]));
    return even / (xi * xi * (l[0] * v[0] + l[1] * v[1]));
}

/// @brief boundary data at a given strength that admits a layer
///
/// subsonic: on the stable manifold (branch +1/-1 picks the side);
/// transonic: on the centre line, on the attracting side for branch +1 and the repelling side for -1;
/// supersonic: along the slow eigendirection, side picked by branch.
inline BoundaryData layer_boundary_point(const GasParams& p, const FluidState& far, double strength, int branch = 1,
                                         const LayerOptions& o = {}) {
    if (!(strength >= 0.0)) throw DomainError("layer_boundary_point: strength must be non-negative");
    const Linearization lin = linearize_layer(p, far);
    const Regime regime = o.case_hint ? *o.case_hint : classify_regime(p, far).tag;
    const double sgn = branch >= 0 ? 1.0 : -1.0;
    auto along = [&](Vec2 v, double s) {
        const double scale = strength / (std::abs(v[0]) + std::abs(v[1]));
        return BoundaryData{far.u + s * scale * v[0], far.theta + s * scale * v[1]};
    };
    if (strength == 0.0) return {far.u, far.theta};
    switch (regime) {
    case Regime::supersonic:
        return along(lin.slowest_stable() == lin.lambda_hi ? lin.v_hi : lin.v_lo, sgn);
    case Regime::transonic: {
        const bool lo_is_centre = std::abs(lin.lambda_lo) < std::abs(lin.lambda_hi);
        const double a = centre_coefficient(p, far, lin);
        return along(lo_is_centre ? lin.v_lo : lin.v_hi, a > 0.0 ? -sgn : sgn);
    }
    case Regime::subsonic: break;
    }
    // march along the stable manifold in reversed x until the L1 distance equals the strength
    const double eps = o.offset(far);
    if (strength <= eps * (std::abs(lin.v_lo[0]) + std::abs(lin.v_lo[1])))
        return along(lin.v_lo, sgn);
    auto rev = [&](const Vec2& d) {
        const Vec2 f = layer_ode_rhs_deviation(p, far, d);
        return Vec2{-f[0], -f[1]};
    };
    const Vec2 y0{sgn * eps * lin.v_lo[0], sgn * eps * lin.v_lo[1]};
    const ode::Tolerances tol = detail::layer_tolerances(o, o.sample_step);
    auto l1 = [](const Vec2& y) { return std::abs(y[0]) + std::abs(y[1]); };
    auto st = ode::make_dopri5<2>(rev, 0.0, y0, tol);
    double s_prev = 0.0;
    Vec2 y_prev = y0;
    const double s_limit = std::max(1e3, 100.0 / std::abs(lin.lambda_lo));
    for (double s = o.sample_step;; s += o.sample_step) {
        st.advance_to(s);
        const Vec2 y = st.y();
        if (far.u + y[0] >= 0.0 || far.theta + y[1] <= 0.0 || s > s_limit)
            throw NumericalError("layer_boundary_point: stable manifold leaves the admissible region");
        if (l1(y) >= strength) {
            double a = s_prev, b = s;
            Vec2 ym = y;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
                const double m = 0.5 * (a + b);
                auto sub = ode::make_dopri5<2>(rev, s_prev, y_prev, tol);
                sub.advance_to(m);
                ym = sub.y();
                (l1(ym) < strength ? a : b) = m;
            }
            return {far.u + ym[0], far.theta + ym[1]};
        }
        s_prev = s;
        y_prev = y;
    }
}

enum class DecayKind { exponential, algebraic, inconclusive };

inline const char* to_string(DecayKind k) {
    switch (k) {
    case DecayKind::exponential: return "exponential";
    case DecayKind::algebraic: return "algebraic";
    case DecayKind::inconclusive: return "inconclusive";
    }
    return "?";
}

struct DecayReport {
    DecayKind kind = DecayKind::inconclusive;
    double rate = 0.0;         ///< exponential model: |dev| ~ exp(-rate x)
    double exponent = 0.0;     ///< algebraic model: |dev| ~ (1 + delta x)^exponent
    double residual_exp = 0.0; ///< RMS of the log-fit residuals
    double residual_alg = 0.0;
    std::size_t points = 0;
    double decades = 0.0; ///< decades of (1 + delta x) covered by the fit
};

/// optional window on 1 + delta x for the fit
struct DecayWindow {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

} // namespace detail

/// classify the tail decay of |u~ - u_+| (falling back to theta when u~ is flat)
inline DecayReport measure_decay(const LayerProfile& prof, std::optional<DecayWindow> window = std::nullopt) {
    DecayReport rep;
    if (!prof.exists() || prof.xs().size() < 2) return rep;
    const FluidState far = prof.far();
    const auto& xs = prof.xs();
    std::vector<double> dev(xs.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        dev[i] = std::abs(prof.us()[i] - far.u);
        dmax = std::max(dmax, dev[i]);
    }
    if (dmax == 0.0) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            dev[i] = std::abs(prof.thetas()[i] - far.theta);
            dmax = std::max(dmax, dev[i]);
        }
    }
    const double delta = prof.strength();
    if (dmax == 0.0 || delta == 0.0) return rep;
    std::vector<double> xe, xa, ly;
    double zlo = std::numeric_limits<double>::infinity(), zhi = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double z = 1.0 + delta * xs[i];
        if (window) {
            if (z < window->lo || z > window->hi) continue;
        } else if (dev[i] > 0.1 * dmax) {
            continue;
        }
        if (!(dev[i] > 1e-14 * dmax)) continue;
        xe.push_back(xs[i]);
        xa.push_back(std::log(z));
        ly.push_back(std::log(dev[i]));
        zlo = std::min(zlo, z);
        zhi = std::max(zhi, z);
    }
    rep.points = xe.size();
    if (rep.points < 8) return rep;
    const auto fe = detail::least_squares(xe, ly);
    const auto fa = detail::least_squares(xa, ly);
    rep.rate = -fe.slope;
    rep.exponent = fa.slope;
    rep.residual_exp = fe.rms;
    rep.residual_alg = fa.rms;
    rep.decades = std::log10(zhi / zlo);
    rep.kind = fe.rms <= fa.rms ? DecayKind::exponential : DecayKind::algebraic;
    return rep;
}

/// @brief smallest sampled x >= 1 beyond which the discrete slopes of u~ and theta~ are nonnegative
inline double find_M0(const LayerProfile& prof, double slack = 0.0) {
    if (!prof.exists()) throw NumericalError("find_M0: layer does not exist");
    const auto& xs = prof.xs();
    const auto& us = prof.us();
    const auto& ts = prof.thetas();
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (us[i + 1] - us[i] < -slack || ts[i + 1] - ts[i] < -slack) start = i + 1;
    if (xs.size() >= 2 && start == xs.size() - 1)
        throw NumericalError("find_M0: slopes are never nonnegative in the tail");
    for (std::size_t i = start; i < xs.size(); ++i)
        if (xs[i] >= 1.0) return xs[i];
    return std::max(1.0, xs.back());
}

namespace detail {

/// Fornberg weights of the first derivative at x0 on the nodes z
template <std::size_t K>
std::array<double, K> derivative_weights(const std::array<double, K>& z, double x0) {
    std::array<std::array<double, 2>, K> c{};
    double c1 = 1.0, c4 = z[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < K; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = z[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, K> w{};
    for (std::size_t i = 0; i < K; ++i) w[i] = c[i][1];
    return w;
}

} // namespace detail

/// @brief max |slope - rhs| over all samples
///
/// Slopes come from five-point (fourth-order) finite differences on the
/// nearest samples, centred where possible.
inline double layer_ode_residual(const GasParams& p, const LayerProfile& prof) {
    if (!prof.exists()) throw NumericalError("layer_ode_residual: layer does not exist");
    const auto& x = prof.xs();
    const auto& u = prof.us();
    const auto& t = prof.thetas();
    const FluidState far = prof.far();
    const std::size_t n = x.size();
    if (n < 5) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = std::min(i < 2 ? 0 : i - 2, n - 5);
        std::array<double, 5> z{};
        for (std::size_t k = 0; k < 5; ++k) z[k] = x[lo + k];
        const auto w = detail::derivative_weights(z, x[i]);
        double su = 0.0, st = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            // differences of deviations keep the far-state offset out of the sum
            su += w[k] * (u[lo + k] - u[i]);
            st += w[k] * (t[lo + k] - t[i]);
        }
        const Vec2 f = layer_ode_rhs_deviation(p, far, {u[i] - far.u, t[i] - far.theta});
        worst = std::max({worst, std::abs(su - f[0]), std::abs(st - f[1])});
    }
    return worst;
}

inline void write_layer_csv(std::ostream& os, const LayerProfile& prof) {
    os << "x,u_tilde,theta_tilde,rho_tilde\n";
    for (std::size_t i = 0; i < prof.xs().size(); ++i)
        io::write_row(os, {prof.xs()[i], prof.us()[i], prof.thetas()[i], prof.rhos()[i]});
}

} // namespace nsm
