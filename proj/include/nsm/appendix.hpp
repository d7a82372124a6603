#pragma once
/**
 * @brief Reduced 1-D systems obtained from the nine field alignments, their closed-form
 * electromagnetic solutions, and a solver check of the decoupled relaxation model.
 */
#include <array>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "nsm/core.hpp"
#include "nsm/field.hpp"
#include "nsm/solver.hpp"

namespace nsm {

enum class ReducedSystem { system1 = 1, system2, system3, system4, system5 };

inline const char* to_string(ReducedSystem s) {
    switch (s) {
    case ReducedSystem::system1: return "system-1";
    case ReducedSystem::system2: return "system-2";
    case ReducedSystem::system3: return "system-3";
    case ReducedSystem::system4: return "system-4";
    case ReducedSystem::system5: return "system-5";
    }
    return "?";
}

/// the non-zero component (0 = x, 1 = y, 2 = z) of u, E and B
struct Alignment {
    int u = 0;
    int E = 0;
    int B = 0;
};

struct ReducedModelCase {
    int case_id = 0;
    Alignment align;
    ReducedSystem system = ReducedSystem::system1;
    bool flip_b = false; ///< the system follows after substituting b = -b~
    std::vector<std::string> em_equations;
    std::string lorentz;  ///< force on the momentum equation
    std::string heating;  ///< electromagnetic heating in the temperature equation
    std::string closed_form;
};

inline std::vector<std::string> surviving_equations(ReducedSystem s) {
    switch (s) {
    case ReducedSystem::system1: return {"eps E_t - b_x + E + u b = 0", "b_t - E_x = 0"};
    case ReducedSystem::system2: return {"eps E_t + E = 0", "E_x = 0", "b_x - u b = 0", "b_t = 0"};
    case ReducedSystem::system3: return {"E b = 0", "eps E_t + E = 0", "E_x = 0", "b_t = 0", "b_x = 0"};
    case ReducedSystem::system4: return {"E b = 0", "eps E_t + E = 0", "b_x - u b = 0", "b_t = 0"};
    case ReducedSystem::system5: return {"eps E_t + E = 0", "b_t = 0", "b_x = 0"};
    }
    return {};
}

inline ReducedModelCase reduce_case(int case_id) {
    static constexpr std::array<Alignment, 9> align{{
        {0, 2, 1}, {0, 1, 2}, {0, 2, 2}, {0, 1, 1}, {0, 2, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 0},
    }};
    if (case_id < 1 || case_id > 9) throw DomainError("reduce_case: case id must be in 1..9");
    ReducedModelCase c;
    c.case_id = case_id;
    c.align = align[static_cast<std::size_t>(case_id - 1)];
    c.system = static_cast<ReducedSystem>((case_id + 1) / 2);
    c.flip_b = case_id == 2;
    c.em_equations = surviving_equations(c.system);
    switch (c.system) {
    case ReducedSystem::system1:
        c.lorentz = "-(E + u b) b";
        c.heating = "(E + u b)^2";
        c.closed_form = "none (fully coupled)";
        break;
    case ReducedSystem::system2:
        c.lorentz = "-u b^2";
        c.heating = "E^2 + (u b)^2";
        c.closed_form = "E = E(0) exp(-t/eps), b = b(0) exp(int_0^x u(y,0) dy)";
        break;
    case ReducedSystem::system3:
        c.lorentz = "0";
        c.heating = "E^2";
        c.closed_form = "E = E(0) exp(-t/eps) with b = 0, or E = 0 with b constant";
        break;
    case ReducedSystem::system4:
        c.lorentz = "-u b^2";
        c.heating = "E^2 + (u b)^2";
        c.closed_form = "E = E(x,0) exp(-t/eps) with b = 0, or E = 0 with b = b(0) exp(int_0^x u(y,0) dy)";
        break;
    case ReducedSystem::system5:
        c.lorentz = "0";
        c.heating = "E^2";
        c.closed_form = "E = E(x,0) exp(-t/eps), b constant";
        break;
    }
    return c;
}

inline std::vector<ReducedModelCase> case_table() {
    std::vector<ReducedModelCase> t;
    for (int i = 1; i <= 9; ++i) t.push_back(reduce_case(i));
    return t;
}

inline void write_reduction_table(std::ostream& os) {
    static const char* axis = "xyz";
    os << "case  u  E  B  system    b-flip  closed form\n";
    for (const auto& c : case_table()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-5d %c  %c  %c  %-9s %-7s ", c.case_id, axis[c.align.u], axis[c.align.E],
                      axis[c.align.B], to_string(c.system), c.flip_b ? "yes" : "no");
        os << buf << c.closed_form << '\n';
    }
}

/// E(t) = E(0) exp(-t/eps)
inline double closed_form_E(const GasParams& p, double E0, double t) {
    if (!(p.epsilon > 0.0)) throw DomainError("closed_form_E: epsilon must be positive");
    return E0 * std::exp(-t / p.epsilon);
}

/// b(x) = b(0) exp(int_0^x u(y, 0) dy), the integral by the trapezoid rule on the samples
inline std::vector<double> closed_form_b(const std::vector<double>& u0, double dx, double b0) {
    std::vector<double> b(u0.size());
    double integral = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (i > 0) integral += 0.5 * dx * (u0[i - 1] + u0[i]);
        b[i] = b0 * std::exp(integral);
    }
    return b;
}

/// the branch of E b = 0 to follow in systems 3 and 4
enum class ZeroBranch { b_zero, E_zero };

struct ClosedFormEM {
    std::vector<double> E, b;
};

/// closed-form (E, b) on the grid for systems 2..5 at time t
inline ClosedFormEM closed_form_fields(const GasParams& p, ReducedSystem sys, ZeroBranch branch,
                                       const std::vector<double>& E0, const std::vector<double>& u0, double dx,
                                       double b0, double t) {
    if (sys == ReducedSystem::system1) throw DomainError("closed_form_fields: system-1 has no closed form");
    ClosedFormEM f;
    const double decay = std::exp(-t / p.epsilon);
    f.E.resize(E0.size());
    for (std::size_t i = 0; i < E0.size(); ++i) f.E[i] = E0[i] * decay;
    const bool exponential_b = sys == ReducedSystem::system2 || sys == ReducedSystem::system4;
    f.b = exponential_b ? closed_form_b(u0, dx, b0) : std::vector<double>(E0.size(), b0);
    if (sys == ReducedSystem::system3 || sys == ReducedSystem::system4) {
        if (branch == ZeroBranch::b_zero)
            f.b.assign(E0.size(), 0.0);
        else
            f.E.assign(E0.size(), 0.0);
    }
    return f;
}

struct ReductionReport {
    double max_E_error = 0.0;  ///< max |E - E(0) exp(-t/eps)| / max |E(0)|
    double max_b_drift = 0.0;  ///< max |b(t) - b(0)|
    std::size_t records = 0;
    double t_end = 0.0;
};

/// run the relaxation model from `initial` and compare E with the closed form at every record
inline ReductionReport verify_reduction(const GasParams& p, const EndStates& end, SolverConfig cfg,
                                        FieldState initial) {
    cfg.maxwell = MaxwellModel::relaxation;
    Solver solver(p, end, cfg);
    const std::vector<double> E0 = initial.E, b0 = initial.b;
    double scale = 0.0;
    for (double e : E0) scale = std::max(scale, std::abs(e));
    if (scale == 0.0) scale = 1.0;
    ReductionReport rep;
    solver.run(initial, [&](const FieldState& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            rep.max_E_error = std::max(rep.max_E_error, std::abs(s.E[i] - closed_form_E(p, E0[i], s.t)) / scale);
            rep.max_b_drift = std::max(rep.max_b_drift, std::abs(s.b[i] - b0[i]));
        }
        ++rep.records;
        rep.t_end = s.t;
    });
    return rep;
}

} // namespace nsm
