#pragma once
// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nsm {

class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 2) throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: abscissae must increase");
        d_.assign(n, 0.0);
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = s[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
        d_[0] = end_slope(h[0], h[1], s[0], s[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }

    [[nodiscard]] double front() const { return x_.front(); }
    [[nodiscard]] double back() const { return x_.back(); }

    [[nodiscard]] double operator()(double x) const { return eval(x, false); }
    [[nodiscard]] double derivative(double x) const { return eval(x, true); }

  private:
    static double end_slope(double h0, double h1, double s0, double s1) {
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0)
            d = 0.0;
        else if (s0 * s1 <= 0.0 && std::abs(d) > std::abs(3.0 * s0))
            d = 3.0 * s0;
        return d;
    }

    [[nodiscard]] double eval(double x, bool deriv) const {
        if (x <= x_.front()) return deriv ? 0.0 : y_.front();
        if (x >= x_.back()) return deriv ? 0.0 : y_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1], m0 = d_[i] * h, m1 = d_[i + 1] * h;
        if (deriv) {
            const double t2 = t * t;
            return ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 +
                    (3.0 * t2 - 2.0 * t) * m1) /
                   h;
        }
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 +
               (t3 - t2) * m1;
    }

    std::vector<double> x_, y_, d_;
};

} // namespace nsm
