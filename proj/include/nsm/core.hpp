#pragma once
/**
 * @brief Thermodynamics, sonic regimes, parameter bounds and the
 * electromagnetic Riemann-invariant transform for the 1-D
 * Navier-Stokes-Maxwell outflow problem.
 */
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsm {

/// thrown for inputs outside the domain of a formula (non-positive density, ...)
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// thrown when a numerical construction fails (singular linearization, lost positivity, ...)
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// thrown for inconsistent user configuration
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// @brief physical constants of the polytropic gas and the Maxwell coupling
struct GasParams {
    double R = 1.0;
    double gamma = 5.0 / 3.0;
    double mu = 1.0;
    double kappa = 1.0;
    double epsilon = 0.01;

    /// list of violated invariants (empty when valid)
    [[nodiscard]] std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(R > 0.0)) out.emplace_back("R must be positive");
        if (!(gamma > 1.0)) out.emplace_back("gamma must exceed 1");
        if (!(mu > 0.0)) out.emplace_back("mu must be positive");
        if (!(kappa > 0.0)) out.emplace_back("kappa must be positive");
        if (!(epsilon > 0.0)) out.emplace_back("epsilon must be positive");
        return out;
    }

    void validate() const {
        auto v = violations();
        if (!v.empty()) throw DomainError(v.front());
    }

    friend bool operator==(const GasParams&, const GasParams&) = default;
};

/// a fluid state (rho, u, theta); electromagnetic parts of the wave profiles are zero
struct FluidState {
    double rho = 1.0;
    double u = 0.0;
    double theta = 1.0;

    friend bool operator==(const FluidState&, const FluidState&) = default;
};

/// @brief far-field state, boundary data and the optional intermediate state
struct EndStates {
    double rho_plus = 1.0;
    double u_plus = -1.0;
    double theta_plus = 1.0;
    double u_minus = -1.0;
    double theta_minus = 1.0;
    std::optional<FluidState> star;

    [[nodiscard]] FluidState far() const { return {rho_plus, u_plus, theta_plus}; }

    /// state the boundary layer connects to: the intermediate state when present
    [[nodiscard]] FluidState layer_far() const { return star ? *star : far(); }

    [[nodiscard]] std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(rho_plus > 0.0)) out.emplace_back("rho_plus must be positive");
        if (!(theta_plus > 0.0)) out.emplace_back("theta_plus must be positive");
        if (!(theta_minus > 0.0)) out.emplace_back("theta_minus must be positive");
        if (!(u_minus < 0.0)) out.emplace_back("u_minus must be negative (outflow)");
        if (star) {
            if (!(star->rho > 0.0)) out.emplace_back("rho_star must be positive");
            if (!(star->theta > 0.0)) out.emplace_back("theta_star must be positive");
        }
        return out;
    }
};

inline double pressure(const GasParams& p, double rho, double theta) {
    if (!(rho > 0.0) || !(theta > 0.0)) throw DomainError("pressure: rho and theta must be positive");
    return p.R * rho * theta;
}

/// polytropic sound speed sqrt(R gamma theta); independent of the density
inline double sound_speed(const GasParams& p, double theta) {
    if (!(theta > 0.0)) throw DomainError("sound_speed: theta must be positive");
    return std::sqrt(p.R * p.gamma * theta);
}

inline double sound_speed(const GasParams& p, double /*rho*/, double theta) { return sound_speed(p, theta); }

/// third characteristic speed u + c
inline double lambda3(const GasParams& p, const FluidState& s) { return s.u + sound_speed(p, s.theta); }

enum class Regime { subsonic, transonic, supersonic };

struct SonicRegime {
    Regime tag = Regime::subsonic;
    /// true when u < 0 (the "-" branch of the region)
    bool negative = true;
    double mach = 0.0;
};

inline constexpr double transonic_tolerance = 1e-9;

inline SonicRegime classify_regime(const GasParams& p, double /*rho*/, double u, double theta,
                                   double tol = transonic_tolerance) {
    const double c = sound_speed(p, theta);
    SonicRegime r;
    r.mach = std::abs(u) / c;
    r.negative = u < 0.0;
    if (std::abs(r.mach - 1.0) <= tol)
        r.tag = Regime::transonic;
    else if (r.mach < 1.0)
        r.tag = Regime::subsonic;
    else
        r.tag = Regime::supersonic;
    return r;
}

inline SonicRegime classify_regime(const GasParams& p, const FluidState& s, double tol = transonic_tolerance) {
    return classify_regime(p, s.rho, s.u, s.theta, tol);
}

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::subsonic: return "subsonic";
    case Regime::transonic: return "transonic";
    case Regime::supersonic: return "supersonic";
    }
    return "?";
}

/// @brief the constants beta_1, beta_2, beta_3 and the bound on the dielectric constant
struct DielectricBound {
    double beta1 = 0.0; ///< max{|u_-|, |u_+|}
    double beta2 = 0.0; ///< max{theta_-, theta_+}
    double beta3 = 0.0; ///< beta1 + sqrt(R gamma beta2)
    /// upper bound for epsilon; +inf when beta1 == 0 (no restriction)
    double value = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool unbounded() const { return std::isinf(value); }
    [[nodiscard]] bool admits(double eps) const { return eps > 0.0 && eps < value; }
};

inline DielectricBound dielectric_bound(double u_minus, double u_plus, double theta_minus, double theta_plus,
                                        const GasParams& p) {
    DielectricBound b;
    b.beta1 = std::max(std::abs(u_minus), std::abs(u_plus));
    b.beta2 = std::max(theta_minus, theta_plus);
    b.beta3 = b.beta1 + std::sqrt(p.R * p.gamma * b.beta2);
    if (b.beta1 > 0.0) b.value = 1.0 / (64.0 * b.beta1 * b.beta3);
    return b;
}

inline DielectricBound dielectric_bound(const EndStates& e, const GasParams& p) {
    return dielectric_bound(e.u_minus, e.u_plus, e.theta_minus, e.theta_plus, p);
}

/// Riemann invariants of the Maxwell subsystem; w1 travels with +1/sqrt(eps), w2 with -1/sqrt(eps)
struct RiemannPair {
    double w1 = 0.0;
    double w2 = 0.0;
};

inline RiemannPair to_riemann(const GasParams& p, double E, double b) {
    if (!(p.epsilon > 0.0)) throw DomainError("to_riemann: epsilon must be positive");
    const double se = std::sqrt(p.epsilon);
    return {0.5 * se * (se * E - b), 0.5 * se * (se * E + b)};
}

struct EMField {
    double E = 0.0;
    double b = 0.0;
};

inline EMField from_riemann(const GasParams& p, RiemannPair w) {
    if (!(p.epsilon > 0.0)) throw DomainError("from_riemann: epsilon must be positive");
    const double se = std::sqrt(p.epsilon);
    return {(w.w1 + w.w2) / p.epsilon, (w.w2 - w.w1) / se};
}

} // namespace nsm
