#pragma once
/**
 * @brief Property suites run by the `check` subcommand. Each suite samples its
 * inputs from a seeded generator and reports the worst case it saw.
 */
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nsm/appendix.hpp"
#include "nsm/core.hpp"
#include "nsm/diagnostics.hpp"
#include "nsm/io.hpp"
#include "nsm/rarefaction.hpp"

namespace nsm {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace checks {

/// @brief both compositions of the Riemann transform are the identity
///
/// Errors are measured in the energy-weighted norm sqrt(eps)|E| + |b| (and |W1| + |W2|
/// for the pair): recovering E divides a difference of O(sqrt(eps) b) terms by eps, so
/// the plain relative error in E alone grows like 1/sqrt(eps) when b dominates.
inline double riemann_round_trip_error(const GasParams& p, double E, double b) {
    const double se = std::sqrt(p.epsilon);
    const EMField f = from_riemann(p, to_riemann(p, E, b));
    const double e1 = (se * std::abs(f.E - E) + std::abs(f.b - b)) / std::max(se * std::abs(E) + std::abs(b), 1e-300);
    // the same magnitudes read as a pair
    const RiemannPair w{E, b};
    const RiemannPair v = to_riemann(p, from_riemann(p, w).E, from_riemann(p, w).b);
    const double e2 = (std::abs(v.w1 - w.w1) + std::abs(v.w2 - w.w2)) / std::max(std::abs(w.w1) + std::abs(w.w2), 1e-300);
    return std::max(e1, e2);
}

inline CheckResult riemann_round_trip(std::uint64_t seed, std::size_t samples = 10000) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-10.0, 10.0), lge(-4.0, 2.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        GasParams p;
        p.epsilon = std::pow(10.0, lge(rng));
        const double E = val(rng), b = val(rng);
        worst = std::max(worst, riemann_round_trip_error(p, E, b));
    }
    return {"riemann_round_trip", worst <= 1e-14, "max relative error " + io::fmt17(worst)};
}

inline CheckResult cq_normalisation() {
    const double e1 = std::abs(cq_constant(1.0) - 1.0), e2 = std::abs(cq_constant(2.0) - 0.5);
    return {"cq_normalisation", e1 <= 1e-10 && e2 <= 1e-10,
            "|C1 - 1| = " + io::fmt17(e1) + ", |C2 - 1/2| = " + io::fmt17(e2)};
}

/// eta >= 0, with eta = 0 at zero perturbation
inline CheckResult energy_density_sign(std::uint64_t seed, std::size_t samples = 10000) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.2, 3.0), vel(-2.0, 2.0);
    const GasParams p;
    double min_eta = std::numeric_limits<double>::infinity(), max_zero = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const FluidState hat{pos(rng), vel(rng), pos(rng)};
        const FluidState s{pos(rng), vel(rng), pos(rng)};
        min_eta = std::min(min_eta, energy_density(p, s, hat));
        max_zero = std::max(max_zero, std::abs(energy_density(p, hat, hat)));
    }
    return {"energy_density_sign", min_eta >= 0.0 && max_zero <= 1e-14,
            "min eta " + io::fmt17(min_eta) + ", max |eta(hat, hat)| " + io::fmt17(max_zero)};
}

/// norms scale with |lambda|
inline CheckResult norm_homogeneity(std::uint64_t seed, std::size_t samples = 200) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lam(-5.0, 5.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const auto f = random_smooth_field(rng, 257, 10.0, false);
        const double l = lam(rng);
        std::vector<double> g(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) g[i] = l * f[i];
        const Norms a = norms(f, 10.0 / 256.0), b = norms(g, 10.0 / 256.0);
        for (auto [x, y] : {std::pair{a.l2, b.l2}, std::pair{a.h1, b.h1}, std::pair{a.sup, b.sup}})
            if (x > 0.0) worst = std::max(worst, std::abs(y - std::abs(l) * x) / (std::abs(l) * x));
    }
    return {"norm_homogeneity", worst <= 1e-13, "max relative deviation " + io::fmt17(worst)};
}

inline CheckResult sobolev(std::uint64_t seed, std::size_t samples = 1000) {
    std::mt19937_64 rng(seed);
    std::size_t bad = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        const auto f = random_smooth_field(rng, 401, 20.0, true);
        const auto r = sobolev_check(f, 20.0 / 400.0);
        bad += r.violations;
        worst = std::max(worst, r.max_excess);
    }
    return {"sobolev_inequality", bad == 0,
            std::to_string(bad) + " violations, max lhs - rhs " + io::fmt17(worst)};
}

inline CheckResult poincare(std::uint64_t seed, std::size_t samples = 1000) {
    std::mt19937_64 rng(seed);
    std::size_t bad = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        const auto f = random_smooth_field(rng, 401, 20.0, false);
        const auto r = poincare_check(f, 20.0 / 400.0);
        const auto g = poincare_check_global(f, 20.0 / 400.0);
        bad += r.violations + g.violations;
        worst = std::max({worst, r.max_excess, g.max_excess});
    }
    return {"poincare_inequality", bad == 0,
            std::to_string(bad) + " violations, max lhs - rhs " + io::fmt17(worst)};
}

inline CheckResult closed_form_multiplicative(std::uint64_t seed, std::size_t samples = 1000) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> t(0.0, 5.0), e(0.01, 2.0), v(-3.0, 3.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        GasParams p;
        p.epsilon = e(rng);
        const double E0 = v(rng), t1 = t(rng), t2 = t(rng);
        const double lhs = closed_form_E(p, E0, t1 + t2);
        const double rhs = closed_form_E(p, E0, t1) * std::exp(-t2 / p.epsilon);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return {"closed_form_multiplicative", worst <= 1e-14, "max error " + io::fmt17(worst)};
}

inline CheckResult case_table_image() {
    std::map<ReducedSystem, int> count;
    for (const auto& c : case_table()) ++count[c.system];
    const bool ok = count[ReducedSystem::system1] == 2 && count[ReducedSystem::system2] == 2 &&
                    count[ReducedSystem::system3] == 2 && count[ReducedSystem::system4] == 2 &&
                    count[ReducedSystem::system5] == 1;
    std::string d;
    for (const auto& [s, n] : count) d += std::string(d.empty() ? "" : ", ") + to_string(s) + " x" + std::to_string(n);
    return {"case_table_image", ok, d};
}

} // namespace checks

inline std::vector<CheckResult> run_checks(std::uint64_t seed) {
    return {checks::riemann_round_trip(seed),  checks::cq_normalisation(),
            checks::energy_density_sign(seed), checks::norm_homogeneity(seed),
            checks::sobolev(seed),             checks::poincare(seed),
            checks::closed_form_multiplicative(seed), checks::case_table_image()};
}

} // namespace nsm
