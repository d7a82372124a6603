#pragma once
/**
 * @brief Adaptive Dormand-Prince 5(4) integrator for small autonomous systems.
 *
 * The stepper keeps its own step size between calls so a driver can advance it
 * to a sequence of output abscissae (uniform, geometric, ...) and land on each
 * exactly. Integration may run in either direction.
 */
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "nsm/core.hpp"

namespace nsm::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Tolerances {
    double rtol = 1e-10;
    double atol = 1e-13;
    double h_init = 1e-3;
    double h_max = 1.0;
    double h_min = 1e-14;
    std::size_t max_steps = 50'000'000;
    /// scale every component's error by the state's max-norm instead of its own magnitude
    bool norm_relative = false;
};

template <std::size_t N, class F>
class Dopri5 {
  public:
    Dopri5(F rhs, double x0, const Vec<N>& y0, Tolerances tol = {})
        : f_(std::move(rhs)), x_(x0), y_(y0), tol_(tol), h_(tol.h_init) {
        k1_ = f_(y_);
    }

    [[nodiscard]] double x() const { return x_; }
    [[nodiscard]] const Vec<N>& y() const { return y_; }
    [[nodiscard]] const Vec<N>& dydx() const { return k1_; }
    [[nodiscard]] std::size_t steps() const { return steps_; }

    void set_max_step(double h) { tol_.h_max = h; }

    /// advance to x_target (either direction), landing on it exactly
    void advance_to(double x_target) {
        const double dir = x_target >= x_ ? 1.0 : -1.0;
        while ((x_target - x_) * dir > 0.0) {
            const double remaining = std::abs(x_target - x_);
            double h = std::min({h_, tol_.h_max, remaining});
            const bool clipped = h < std::min(h_, tol_.h_max);
            for (;;) {
                Vec<N> ynew, knew;
                const double err = attempt(dir * h, ynew, knew);
                if (!std::isfinite(err)) {
                    h *= 0.25;
                } else if (err <= 1.0) {
                    x_ = h >= remaining ? x_target : x_ + dir * h;
                    y_ = ynew;
                    k1_ = knew;
                    ++steps_;
                    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                    // a landing step shorter than the controller's choice says nothing about h_
                    if (!clipped || h * fac < h_) h_ = std::min(h * fac, tol_.h_max);
                    break;
                } else {
                    h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                }
                if (h < tol_.h_min) throw NumericalError("ode: step size underflow");
            }
            if (steps_ > tol_.max_steps) throw NumericalError("ode: step budget exhausted");
        }
    }

  private:
    double attempt(double h, Vec<N>& ynew, Vec<N>& knew) const {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                         a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                         b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                         e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        Vec<N> t;
        auto stage = [&](auto&& combine) {
            for (std::size_t i = 0; i < N; ++i) t[i] = y_[i] + h * combine(i);
            return f_(t);
        };
        const Vec<N>& k1 = k1_;
        const Vec<N> k2 = stage([&](std::size_t i) { return a21 * k1[i]; });
        const Vec<N> k3 = stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
        const Vec<N> k4 = stage([&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
        const Vec<N> k5 =
            stage([&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
        const Vec<N> k6 = stage(
            [&](std::size_t i) { return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]; });
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        knew = f_(ynew);

        double ymag = 0.0;
        if (tol_.norm_relative)
            for (std::size_t i = 0; i < N; ++i) ymag = std::max({ymag, std::abs(y_[i]), std::abs(ynew[i])});
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double err =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * knew[i]);
            const double mag = tol_.norm_relative ? ymag : std::max(std::abs(y_[i]), std::abs(ynew[i]));
            const double sc = tol_.atol + tol_.rtol * mag;
            acc += (err / sc) * (err / sc);
        }
        return std::sqrt(acc / static_cast<double>(N));
    }

    F f_;
    double x_;
    Vec<N> y_;
    Vec<N> k1_{};
    Tolerances tol_;
    double h_;
    std::size_t steps_ = 0;
};

template <std::size_t N, class F>
Dopri5<N, F> make_dopri5(F rhs, double x0, const Vec<N>& y0, Tolerances tol = {}) {
    return Dopri5<N, F>(std::move(rhs), x0, y0, tol);
}

} // namespace nsm::ode
