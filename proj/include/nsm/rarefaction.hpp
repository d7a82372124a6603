#pragma once
/**
 * @brief 3-rarefaction curve, the smoothed Burgers approximation and the exact fan.
 *
 * Along the curve rho^(1-gamma) theta is constant and c = sqrt(R gamma theta) = k rho^((gamma-1)/2)
 * with k = sqrt(R gamma rho_+^(1-gamma) theta_+), so u - 2c/(gamma-1) is constant as well.
 * The smoothed wave is built from w(x, 1+t), the solution of w_t + w w_x = 0 with
 * w(x, 0) = w_- + delta_r P(q+1, alpha x) for x >= 0, where P is the regularized lower
 * incomplete gamma function.
 */
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "nsm/core.hpp"
#include "nsm/io.hpp"
#include "nsm/profile.hpp"

namespace nsm {

/// 3-rarefaction curve through an anchor state
class R3Curve {
  public:
    R3Curve(const GasParams& p, const FluidState& anchor) : p_(p), a_(anchor) {
        p_.validate();
        if (!(a_.rho > 0.0) || !(a_.theta > 0.0)) throw DomainError("R3Curve: anchor must have positive rho, theta");
        entropy_ = std::pow(a_.rho, 1.0 - p_.gamma) * a_.theta;
        k_ = std::sqrt(p_.R * p_.gamma * entropy_);
    }

    [[nodiscard]] const FluidState& anchor() const { return a_; }
    [[nodiscard]] double k() const { return k_; }
    /// the invariant rho^(1-gamma) theta
    [[nodiscard]] double entropy() const { return entropy_; }

    [[nodiscard]] double theta(double rho) const {
        if (!(rho > 0.0)) throw DomainError("R3Curve: rho must be positive");
        return entropy_ * std::pow(rho, p_.gamma - 1.0);
    }

    [[nodiscard]] double u(double rho) const {
        if (!(rho > 0.0)) throw DomainError("R3Curve: rho must be positive");
        const double e = 0.5 * (p_.gamma - 1.0);
        return a_.u + (2.0 * k_ / (p_.gamma - 1.0)) * (std::pow(rho, e) - std::pow(a_.rho, e));
    }

    [[nodiscard]] FluidState at(double rho) const { return {rho, u(rho), theta(rho)}; }

    /// state on the curve with sound speed c
    [[nodiscard]] FluidState from_sound_speed(double c) const {
        if (!(c > 0.0)) throw DomainError("R3Curve: sound speed must be positive");
        const double rho = std::pow(c / k_, 2.0 / (p_.gamma - 1.0));
        const double c_plus = sound_speed(p_, a_.theta);
        return {rho, a_.u + 2.0 * (c - c_plus) / (p_.gamma - 1.0), c * c / (p_.R * p_.gamma)};
    }

    /// state on the curve whose characteristic speed u + c equals w
    [[nodiscard]] FluidState from_speed(double w) const {
        const double c_plus = sound_speed(p_, a_.theta);
        const double c = (p_.gamma - 1.0) / (p_.gamma + 1.0) * (w - a_.u + 2.0 * c_plus / (p_.gamma - 1.0));
        return from_sound_speed(c);
    }

    /// relative mismatch of a state with the curve (0 when exactly on it)
    [[nodiscard]] double mismatch(const FluidState& s) const {
        const double de = std::abs(std::pow(s.rho, 1.0 - p_.gamma) * s.theta - entropy_) / entropy_;
        const double du = std::abs(u(s.rho) - s.u) / std::max(1.0, std::abs(s.u));
        return std::max(de, du);
    }

  private:
    GasParams p_;
    FluidState a_;
    double entropy_ = 0.0;
    double k_ = 0.0;
};

/// the state on R3(anchor) with temperature theta_minus
inline FluidState r3_connect(const GasParams& p, const FluidState& anchor, double theta_minus) {
    if (!(theta_minus > 0.0)) throw DomainError("r3_connect: theta_minus must be positive");
    if (theta_minus > anchor.theta)
        throw DomainError("r3_connect: theta_minus must not exceed theta_plus for a rarefaction");
    if (theta_minus == anchor.theta) return anchor;
    const R3Curve curve(p, anchor);
    const double rho = anchor.rho * std::pow(theta_minus / anchor.theta, 1.0 / (p.gamma - 1.0));
    return {rho, curve.u(rho), theta_minus};
}

/// C_q with C_q * int_0^inf y^q e^-y dy = 1, by adaptive Gauss-Kronrod quadrature
inline double cq_constant(double q) {
    if (!(q >= 1.0)) throw DomainError("cq_constant: q must be at least 1");
    auto f = [q](double y) { return std::pow(y, q) * std::exp(-y); };
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
    return 1.0 / integral;
}

/// @brief solution of the Burgers problem with smoothed step data
///
/// Time here is the Burgers time; the rarefaction profile evaluates it at 1 + t.
class BurgersWave {
  public:
    BurgersWave() = default;

    BurgersWave(double w_minus, double w_plus, double alpha = 0.1, double q = 1.0)
        : wm_(w_minus), wp_(w_plus), alpha_(alpha), q_(q) {
        if (!(w_plus >= w_minus)) throw DomainError("BurgersWave: w_plus must not be below w_minus");
        if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("BurgersWave: alpha must lie in (0, 1)");
        if (!(q >= 1.0)) throw DomainError("BurgersWave: q must be at least 1");
    }

    [[nodiscard]] double w_minus() const { return wm_; }
    [[nodiscard]] double w_plus() const { return wp_; }
    [[nodiscard]] double delta_r() const { return wp_ - wm_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double q() const { return q_; }

    [[nodiscard]] double initial(double x) const {
        if (x <= 0.0 || delta_r() == 0.0) return wm_;
        return wm_ + delta_r() * boost::math::gamma_p(q_ + 1.0, alpha_ * x);
    }

    [[nodiscard]] double initial_slope(double x) const {
        if (x <= 0.0 || delta_r() == 0.0) return 0.0;
        return delta_r() * alpha_ * boost::math::gamma_p_derivative(q_ + 1.0, alpha_ * x);
    }

    /// foot of the characteristic through (x, t): x = x0 + w0(x0) t
    [[nodiscard]] double foot(double x, double t) const {
        if (t <= 0.0) return x;
        if (delta_r() == 0.0 || x <= wm_ * t) return x - wm_ * t;
        double lo = std::max(0.0, x - wp_ * t), hi = x - wm_ * t;
        auto F = [&](double x0) { return x0 + initial(x0) * t - x; };
        double flo = F(lo), fhi = F(hi);
        const double tol = std::max(1e-12, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(hi));
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            const double fm = F(mid);
            if (fm == 0.0) return mid;
            if (fm < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        double x0 = flo == fhi ? 0.5 * (lo + hi) : lo - flo * (hi - lo) / (fhi - flo);
        if (!(x0 >= lo && x0 <= hi)) x0 = 0.5 * (lo + hi);
        // keep the bisection midpoint if the secant polish does not improve the residual
        const double mid = 0.5 * (lo + hi);
        return std::abs(F(x0)) <= std::abs(F(mid)) ? x0 : mid;
    }

    [[nodiscard]] double operator()(double x, double t) const {
        if (delta_r() == 0.0 || x <= wm_ * t) return wm_;
        return initial(foot(x, t));
    }

    /// w_x(x, t) = w0'(x0) / (1 + w0'(x0) t)
    [[nodiscard]] double slope(double x, double t) const {
        if (delta_r() == 0.0 || x <= wm_ * t) return 0.0;
        const double g = initial_slope(foot(x, t));
        return g / (1.0 + g * t);
    }

  private:
    double wm_ = 0.0, wp_ = 0.0, alpha_ = 0.1, q_ = 1.0;
};

/// @brief smoothed 3-rarefaction (rho_bar, u_bar, theta_bar)(x, t) from w(x, 1+t)
class RarefactionProfile final : public WaveProfile {
  public:
    RarefactionProfile(const GasParams& p, const FluidState& left, const FluidState& right, double alpha = 0.1,
                       double q = 1.0)
        : p_(p), left_(left), right_(right), curve_(p, right) {
        if (curve_.mismatch(left) > 1e-10)
            throw DomainError("rarefaction: left state is not on the 3-rarefaction curve of the right state");
        if (!(left.theta <= right.theta)) throw DomainError("rarefaction: need theta_minus <= theta_plus");
        const double wm = lambda3(p_, left_), wp = lambda3(p_, right_);
        if (wm < 0.0) throw DomainError("rarefaction: need u_- + c_- >= 0 so the profile is constant near x = 0");
        wave_ = BurgersWave(wm, std::max(wm, wp), alpha, q);
    }

    [[nodiscard]] FluidState at(double x, double t) const override {
        const double T = 1.0 + t;
        if (x <= left_speed() * T || wave_.delta_r() == 0.0) return left_;
        const double w = wave_(x, T);
        if (w >= wave_.w_plus()) return right_;
        if (w <= wave_.w_minus()) return left_;
        return from_speed(w);
    }

    [[nodiscard]] FluidState far() const override { return right_; }
    [[nodiscard]] const FluidState& left() const { return left_; }
    [[nodiscard]] const BurgersWave& wave() const { return wave_; }
    [[nodiscard]] const R3Curve& curve() const { return curve_; }
    [[nodiscard]] const GasParams& params() const { return p_; }
    /// boundary of the constant region, u_- + sqrt(R gamma theta_-)
    [[nodiscard]] double left_speed() const { return wave_.w_minus(); }

    /// (rho_x, u_x, theta_x) at (x, t)
    [[nodiscard]] FluidState slope(double x, double t) const {
        const double T = 1.0 + t;
        if (x <= left_speed() * T || wave_.delta_r() == 0.0) return {0.0, 0.0, 0.0};
        const double x0 = wave_.foot(x, T);
        const double w = wave_.initial(x0);
        const double g = wave_.initial_slope(x0);
        const double wx = g / (1.0 + g * T);
        const FluidState s = from_speed(std::min(w, wave_.w_plus()));
        const double c = sound_speed(p_, s.theta);
        const double cx = (p_.gamma - 1.0) / (p_.gamma + 1.0) * wx;
        return {s.rho * 2.0 / (p_.gamma - 1.0) * cx / c, 2.0 / (p_.gamma + 1.0) * wx, 2.0 * s.theta * cx / c};
    }

    /// states at nodes x_j = x0_j + w0(x0_j) T for a uniform grid in the foot x0 (no root finding)
    struct LagrangianSample {
        std::vector<double> x, u_x;
    };

    [[nodiscard]] LagrangianSample lagrangian_sample(double t, double x0_max, std::size_t n) const {
        const double T = 1.0 + t;
        LagrangianSample s;
        s.x.reserve(n + 2);
        s.u_x.reserve(n + 2);
        s.x.push_back(0.0);
        s.u_x.push_back(0.0);
        for (std::size_t j = 0; j <= n; ++j) {
            const double x0 = x0_max * static_cast<double>(j) / static_cast<double>(n);
            const double g = wave_.initial_slope(x0);
            const double x = x0 + wave_.initial(x0) * T;
            if (x <= s.x.back()) continue;
            s.x.push_back(x);
            s.u_x.push_back(2.0 / (p_.gamma + 1.0) * g / (1.0 + g * T));
        }
        return s;
    }

  private:
    [[nodiscard]] FluidState from_speed(double w) const {
        const FluidState s = curve_.from_speed(w);
        if (!(s.rho > 0.0) || s.rho > right_.rho * (1.0 + 1e-12))
            throw NumericalError("rarefaction: inversion left the admissible density range");
        return s;
    }

    GasParams p_;
    FluidState left_, right_;
    R3Curve curve_;
    BurgersWave wave_;
};

/// exact self-similar rarefaction fan between left and right, evaluated at xi = x / t
inline FluidState exact_rarefaction(const GasParams& p, const FluidState& left, const FluidState& right, double xi) {
    const double wm = lambda3(p, left), wp = lambda3(p, right);
    if (xi <= wm) return left;
    if (xi >= wp) return right;
    return R3Curve(p, right).from_speed(xi);
}

/// sup_x |smoothed(x, t) - fan(x / (1+t))| over the supplied nodes (max over components)
inline double fan_distance(const RarefactionProfile& r, double t, const std::vector<double>& xs) {
    double d = 0.0;
    for (double x : xs) {
        const FluidState a = r.at(x, t);
        const FluidState b = exact_rarefaction(r.params(), r.left(), r.far(), x / (1.0 + t));
        d = std::max({d, std::abs(a.rho - b.rho), std::abs(a.u - b.u), std::abs(a.theta - b.theta)});
    }
    return d;
}

struct RateFit {
    bool conclusive = false;
    double exponent = 0.0;
    std::vector<double> times, norms;
};

/// @brief fitted large-time exponent of ||u_bar_x(t)||_{L^p}, p in {1, 2, inf}
///
/// Norms are taken on the characteristic image of a fine uniform grid in the
/// foot point, which resolves the profile at every t without root finding.
inline RateFit rarefaction_decay_check(const RarefactionProfile& r, double p_exp, const std::vector<double>& t_list,
                                       std::size_t n = 200000) {
    if (!(p_exp == 1.0 || p_exp == 2.0 || std::isinf(p_exp)))
        throw DomainError("rarefaction_decay_check: p must be 1, 2 or infinity");
    RateFit fit;
    if (t_list.size() < 3) return fit;
    const double a = r.wave().alpha();
    // the initial slope has decayed below e^-60 relative beyond this foot point
    const double x0_max = (r.wave().q() + 60.0 + r.wave().q() * std::log(1.0 + 60.0 / r.wave().q())) / a;
    std::vector<double> lx, ly;
    for (double t : t_list) {
        const auto s = r.lagrangian_sample(t, x0_max, n);
        double v = 0.0;
        if (std::isinf(p_exp)) {
            for (double g : s.u_x) v = std::max(v, std::abs(g));
        } else {
            for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
                const double f0 = std::pow(std::abs(s.u_x[i]), p_exp), f1 = std::pow(std::abs(s.u_x[i + 1]), p_exp);
                v += 0.5 * (f0 + f1) * (s.x[i + 1] - s.x[i]);
            }
            v = std::pow(v, 1.0 / p_exp);
        }
        fit.times.push_back(t);
        fit.norms.push_back(v);
        if (v > 0.0) {
            lx.push_back(std::log(1.0 + t));
            ly.push_back(std::log(v));
        }
    }
    if (lx.size() < 3) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.exponent = sxy / sxx;
    fit.conclusive = true;
    return fit;
}

inline void write_rarefaction_csv(std::ostream& os, const RarefactionProfile& r, double t,
                                  const std::vector<double>& xs) {
    os << "x,rho_bar,u_bar,theta_bar\n";
    for (double x : xs) {
        const FluidState s = r.at(x, t);
        io::write_row(os, {x, s.rho, s.u, s.theta});
    }
}

} // namespace nsm
