#pragma once
/**
 * @brief Scenario registry: profile construction, perturbed initial data, the solver
 * run with its diagnostics, verdicts, artifact files, and concurrent batches.
 */
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nsm/appendix.hpp"
#include "nsm/boundary_layer.hpp"
#include "nsm/composite.hpp"
#include "nsm/config.hpp"
#include "nsm/core.hpp"
#include "nsm/diagnostics.hpp"
#include "nsm/field.hpp"
#include "nsm/io.hpp"
#include "nsm/rarefaction.hpp"
#include "nsm/solver.hpp"

namespace nsm {

/// everything derived from a config before time stepping
struct ScenarioSetup {
    GasParams gas;
    EndStates end;
    Grid1D grid;
    DielectricBound bound;
    std::shared_ptr<const LayerProfile> layer;
    std::shared_ptr<const RarefactionProfile> rare;
    std::shared_ptr<const CompositeProfile> profile;
    std::vector<std::string> warnings;
};

inline LayerOptions layer_options(const ScenarioConfig& c) {
    LayerOptions o;
    o.max_strength = c.delta0;
    o.sample_step = c.layer_step;
    return o;
}

inline bool uses_layer(ScenarioId s) {
    return s == ScenarioId::layer_stability || s == ScenarioId::layer_decay ||
           s == ScenarioId::superposition_stability || s == ScenarioId::reduced_model_check;
}

inline bool uses_rarefaction(ScenarioId s) {
    return s == ScenarioId::rarefaction_stability || s == ScenarioId::burgers_decay ||
           s == ScenarioId::superposition_stability;
}

/// @brief build profiles and end states
///
/// The layer connects the boundary data to the intermediate state in the
/// superposition and to the far state otherwise. With boundary = manifold the data
/// are placed on the admissible set at the configured strength.
inline ScenarioSetup build_setup(const ScenarioConfig& c) {
    auto v = c.violations();
    if (!v.empty()) throw ConfigError(v.front());
    ScenarioSetup s;
    s.gas = c.gas;
    // epsilon enters neither profile; any positive value will do until it is fixed below
    GasParams g = c.gas;
    if (c.epsilon_factor > 0.0) g.epsilon = 1.0;
    const FluidState far{c.rho_plus, c.u_plus, c.theta_plus};
    FluidState anchor = far;
    if (c.scenario == ScenarioId::superposition_stability) anchor = r3_connect(g, far, c.theta_star);
    if (c.scenario == ScenarioId::rarefaction_stability || c.scenario == ScenarioId::burgers_decay)
        anchor = r3_connect(g, far, c.theta_minus);
    BoundaryData bd{anchor.u, anchor.theta};
    if (uses_layer(c.scenario)) {
        const LayerOptions o = layer_options(c);
        bd = c.boundary == BoundaryMode::manifold ? layer_boundary_point(g, anchor, c.layer_strength, c.layer_branch, o)
                                                  : BoundaryData{c.u_minus, c.theta_minus};
        auto layer = std::make_shared<LayerProfile>(construct_layer(g, anchor, bd, o));
        if (!layer->exists() && c.scenario != ScenarioId::layer_decay)
            throw NumericalError("no boundary layer for this data: " + layer->message());
        s.layer = layer;
    }
    s.end.rho_plus = far.rho;
    s.end.u_plus = far.u;
    s.end.theta_plus = far.theta;
    s.end.u_minus = bd.u;
    s.end.theta_minus = bd.theta;
    if (c.scenario == ScenarioId::superposition_stability) s.end.star = anchor;

    if (uses_rarefaction(c.scenario))
        s.rare = std::make_shared<RarefactionProfile>(g, anchor, far, c.alpha, c.q);

    if (s.layer && s.layer->exists()) {
        // the layer profile also records the boundary values it realises
        const BoundaryData b = s.layer->boundary();
        s.end.u_minus = b.u;
        s.end.theta_minus = b.theta;
    }
    s.bound = dielectric_bound(s.end, s.gas);
    if (c.epsilon_factor > 0.0) {
        if (s.bound.unbounded()) throw ConfigError("epsilon_factor needs a finite dielectric bound");
        s.gas.epsilon = c.epsilon_factor * s.bound.value;
    }
    if (!s.bound.admits(s.gas.epsilon)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "epsilon = %.6g is not below the dielectric bound %.6g", s.gas.epsilon,
                      s.bound.value);
        s.warnings.emplace_back(buf);
    }
    if (s.layer && !s.layer->exists()) return s;
    s.profile = std::make_shared<CompositeProfile>(s.layer, s.rare, anchor);

    const double T = c.solver.T;
    const double L = c.L > 0.0 ? c.L : default_domain_length(s.gas, far, T);
    s.grid = Grid1D(L, static_cast<std::size_t>(c.N));
    if (s.rare && lambda3(s.gas, far) * (1.0 + T) >= L)
        s.warnings.emplace_back("the rarefaction front reaches x = L before T");
    return s;
}

/// smooth bump with f(0) = 0 exactly
inline double bump(PerturbationShape shape, double x, double centre, double width) {
    if (shape == PerturbationShape::compact_cosine) {
        const double z = (x - centre) / width;
        if (std::abs(z) >= 1.0) return 0.0;
        return 0.5 * (1.0 + std::cos(std::numbers::pi * z));
    }
    const double z = (x - centre) / width, y = x / width;
    return std::exp(-z * z) * -std::expm1(-y * y);
}

/// profile plus the configured perturbation; the electromagnetic pair satisfies sqrt(eps) E(0) = b(0)
inline FieldState initial_data(const ScenarioSetup& s, const ScenarioConfig& c) {
    if (!s.profile) throw NumericalError("initial_data: scenario has no wave profile");
    FieldState f(s.grid, 0.0);
    const auto comps = component_list(c.components);
    auto has = [&](const char* name) { return std::find(comps.begin(), comps.end(), name) != comps.end(); };
    std::array<double, 5> phase{0.0, 0.0, 0.0, 0.0, 0.0};
    const bool modulate = c.seed != 0;
    if (modulate) {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> U(0.0, 2.0 * std::numbers::pi);
        for (double& ph : phase) ph = U(rng);
    }
    auto shape = [&](std::size_t k, double x) {
        const double b = bump(c.shape, x, c.center, c.width);
        return modulate ? b * std::cos(std::numbers::pi * (x - c.center) / c.width + phase[k]) : b;
    };
    const double A = c.amplitude;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = s.grid.x(i);
        const FluidState h = s.profile->at(x, 0.0);
        f.rho[i] = h.rho + (has("phi") ? A * shape(0, x) : 0.0);
        f.u[i] = h.u + (has("psi") ? A * shape(1, x) : 0.0);
        f.theta[i] = h.theta + (has("zeta") ? A * shape(2, x) : 0.0);
        if (has("em")) {
            f.E[i] = A * shape(3, x);
            f.b[i] = A * shape(4, x);
        }
    }
    f.u[0] = s.end.u_minus;
    f.theta[0] = s.end.theta_minus;
    f.b[0] = std::sqrt(s.gas.epsilon) * f.E[0];
    if (f.first_nonpositive() != f.size()) throw DomainError("initial_data: perturbation makes rho or theta non-positive");
    return f;
}

struct CompatibilityReport {
    double u = 0.0, theta = 0.0, em = 0.0;
    [[nodiscard]] bool ok(double tol = 1e-14) const { return u <= tol && theta <= tol && em <= tol; }
};

/// u0(0) = u_-, theta0(0) = theta_-, sqrt(eps) E0(0) = b0(0)
inline CompatibilityReport compatibility(const GasParams& p, const EndStates& e, const FieldState& f) {
    return {std::abs(f.u[0] - e.u_minus), std::abs(f.theta[0] - e.theta_minus),
            std::abs(std::sqrt(p.epsilon) * f.E[0] - f.b[0])};
}

struct SimulationResult {
    std::vector<DiagRecord> records;
    RunAccumulators acc;
    FieldState final_state;
};

using SnapshotSink = std::function<void(std::size_t, const FieldState&)>;

inline SimulationResult simulate(const ScenarioSetup& s, const SolverConfig& cfg, FieldState init,
                                 const SnapshotSink& sink = {}) {
    Solver solver(s.gas, s.end, cfg);
    const CompatibilityReport comp = compatibility(s.gas, s.end, init);
    if (!comp.ok()) throw NumericalError("simulate: initial data violate the compatibility conditions");
    SimulationResult r;
    MassLedger mass;
    mass.flux_scale = std::abs(s.end.rho_plus * s.end.u_plus);
    if (mass.flux_scale == 0.0) mass.flux_scale = 1.0;
    solver.run(init, [&](const FieldState& f) {
        if (r.records.empty()) mass.initial = interior_mass(f);
        r.records.push_back(make_record(s.gas, f, *s.profile, solver.accumulators(), mass, s.end));
        if (sink) sink(r.records.size() - 1, f);
    });
    r.acc = solver.accumulators();
    r.final_state = std::move(init);
    return r;
}

enum class Verdict { pass, fail, error };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::error: return "ERROR";
    }
    return "?";
}

inline int exit_code(Verdict v) { return v == Verdict::pass ? 0 : v == Verdict::fail ? 1 : 2; }

struct ScenarioResult {
    ScenarioId scenario = ScenarioId::superposition_stability;
    Verdict verdict = Verdict::error;
    std::vector<std::string> reasons;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> warnings;
    std::string error;
    std::filesystem::path out_dir;

    [[nodiscard]] int exit_code() const { return nsm::exit_code(verdict); }
    [[nodiscard]] std::optional<double> metric(const std::string& k) const {
        for (const auto& [name, v] : metrics)
            if (name == k) return v;
        return std::nullopt;
    }
    void check(bool ok, const std::string& what) {
        reasons.push_back(std::string(ok ? "ok: " : "failed: ") + what);
        if (!ok) verdict = Verdict::fail;
    }
};

namespace detail {

inline const std::array<const char*, 5> component_names{"phi", "psi", "zeta", "E", "b"};

class Artifacts {
  public:
    explicit Artifacts(std::filesystem::path dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

    [[nodiscard]] bool enabled() const { return enabled_; }

    std::ofstream open(const std::string& name, const std::string& what) {
        files_.emplace_back(name, what);
        return io::open_output(dir_ / name);
    }

    /// two-column gnuplot data
    void series(const std::string& name, const std::string& what, const std::vector<double>& x,
                const std::vector<double>& y) {
        if (!enabled_) return;
        auto os = open(name, what);
        for (std::size_t i = 0; i < x.size(); ++i) os << io::fmt17(x[i]) << ' ' << io::fmt17(y[i]) << '\n';
    }

    void manifest() {
        if (!enabled_) return;
        auto os = io::open_output(dir_ / "manifest.txt");
        for (const auto& [n, w] : files_) os << n << "    " << w << '\n';
    }

  private:
    std::filesystem::path dir_;
    bool enabled_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline void write_records(Artifacts& art, const std::vector<DiagRecord>& recs) {
    if (!art.enabled()) return;
    {
        auto os = art.open("records.csv", "diagnostic records, one row per record time");
        write_record_header(os);
        for (const auto& r : recs) write_record(os, r);
    }
    std::vector<double> t;
    for (const auto& r : recs) t.push_back(r.t);
    for (std::size_t c = 0; c < 5; ++c) {
        std::vector<double> y;
        for (const auto& r : recs) y.push_back(r.norm[c].sup);
        art.series(std::string("sup_") + component_names[c] + ".dat",
                   std::string("t, sup-norm of the ") + component_names[c] + " perturbation", t, y);
    }
    std::vector<double> e, m;
    for (const auto& r : recs) {
        e.push_back(r.energy);
        m.push_back(r.em_energy);
    }
    art.series("energy.dat", "t, fluid energy", t, e);
    art.series("em_energy.dat", "t, electromagnetic energy", t, m);
}

inline void write_final_fields(Artifacts& art, const FieldState& f) {
    if (!art.enabled()) return;
    std::vector<double> x(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) x[i] = f.grid.x(i);
    art.series("final_rho.dat", "x, density at T", x, f.rho);
    art.series("final_u.dat", "x, velocity at T", x, f.u);
    art.series("final_theta.dat", "x, temperature at T", x, f.theta);
    art.series("final_E.dat", "x, electric field at T", x, f.E);
    art.series("final_b.dat", "x, magnetic field at T", x, f.b);
}

inline void stability_scenario(const ScenarioConfig& c, const ScenarioSetup& s, Artifacts& art, ScenarioResult& res) {
    const FieldState init = initial_data(s, c);
    const CompatibilityReport comp = compatibility(s.gas, s.end, init);
    res.metrics.emplace_back("compat_u", comp.u);
    res.metrics.emplace_back("compat_theta", comp.theta);
    res.metrics.emplace_back("compat_em", comp.em);

    std::optional<std::array<double, 5>> floor;
    double floor_fluid = 0.0;
    std::optional<FieldState> reference;
    if (c.floor_run && c.amplitude > 0.0) {
        ScenarioConfig z = c;
        z.amplitude = 0.0;
        const auto fr = simulate(s, c.solver, initial_data(s, z));
        const auto frep = fit_convergence(fr.records);
        std::array<double, 5> fl{};
        for (std::size_t k = 0; k < 5; ++k) fl[k] = frep.conclusive ? frep.component[k].last_quartile : 0.0;
        floor = fl;
        floor_fluid = fr.records.back().sup_fluid();
        reference = fr.final_state;
        res.metrics.emplace_back("floor_sup_fluid", floor_fluid);
    }

    const bool snaps = art.enabled() && c.snapshots;
    const std::size_t total = c.solver.record_times().size();
    const auto stride = static_cast<std::size_t>(c.snapshot_stride);
    const SnapshotSink sink = [&](std::size_t k, const FieldState& f) {
        if (!snaps || !(k % stride == 0 || k + 1 == total)) return;
        char name[64];
        std::snprintf(name, sizeof name, "snapshots/snap_%05zu.csv", k);
        auto os = art.open(name, "snapshot at t = " + io::fmt17(f.t));
        write_snapshot_csv(os, f);
    };
    const auto run = simulate(s, c.solver, init, sink);
    const auto& recs = run.records;
    write_records(art, recs);
    write_final_fields(art, run.final_state);

    const DiagRecord& first = recs.front();
    const DiagRecord& last = recs.back();
    double max_identity = 0.0, max_mass = 0.0;
    std::size_t bands = 0;
    for (const auto& r : recs) {
        max_identity = std::max(max_identity, r.boundary_identity);
        max_mass = std::max(max_mass, r.mass_residual);
        bands = std::max(bands, r.band_violations);
    }
    res.metrics.emplace_back("T", last.t);
    res.metrics.emplace_back("steps", static_cast<double>(run.acc.steps));
    res.metrics.emplace_back("retries", static_cast<double>(run.acc.retries));
    res.metrics.emplace_back("sup_fluid_initial", first.sup_fluid());
    res.metrics.emplace_back("sup_fluid_final", last.sup_fluid());
    res.metrics.emplace_back("sup_em_initial", first.sup_em());
    res.metrics.emplace_back("sup_em_final", last.sup_em());
    res.metrics.emplace_back("max_boundary_identity", max_identity);
    res.metrics.emplace_back("max_mass_residual", max_mass);
    res.metrics.emplace_back("band_violations", static_cast<double>(bands));
    res.metrics.emplace_back("dissipation_integral", last.dissipation_integral);
    if (reference) {
        // distance between the perturbed and unperturbed solutions at T
        double d = 0.0;
        const FieldState& f = run.final_state;
        for (std::size_t i = 0; i < f.size(); ++i)
            d = std::max({d, std::abs(f.rho[i] - reference->rho[i]), std::abs(f.u[i] - reference->u[i]),
                          std::abs(f.theta[i] - reference->theta[i])});
        res.metrics.emplace_back("sup_fluid_vs_reference_final", d);
    }

    const bool fluid_ratio_ok = last.sup_fluid() <= c.fluid_ratio * first.sup_fluid();
    const bool fluid_floor_ok = floor ? last.sup_fluid() <= 1.1 * floor_fluid : c.amplitude == 0.0;
    res.check(fluid_ratio_ok || fluid_floor_ok, "fluid sup-norm at T within the ratio of its initial value or at the floor");
    const bool em_ok = first.sup_em() > 0.0 ? last.sup_em() <= c.em_ratio * first.sup_em() : last.sup_em() == 0.0;
    res.check(em_ok, "electromagnetic sup-norm at T within the ratio of its initial value");
    res.check(max_identity == 0.0, "sqrt(eps) E(0,t) = b(0,t) at every record");
    res.check(max_mass <= 1e-6, "mass balance residual at most 1e-6");
    if (c.amplitude > 0.0) {
        const auto rep = fit_convergence(recs, floor);
        res.metrics.emplace_back("fit_conclusive", rep.conclusive ? 1.0 : 0.0);
        for (std::size_t k = 0; k < 5; ++k)
            res.metrics.emplace_back(std::string("rate_") + component_names[k], rep.component[k].rate);
        if (rep.conclusive) {
            for (std::size_t k = 0; k < 5; ++k)
                res.check(rep.component[k].trend == Trend::decreasing ||
                              (k >= 3 && rep.component[k].first_quartile == 0.0),
                          std::string(component_names[k]) + " sup-norm decreasing toward the floor");
        } else {
            res.reasons.emplace_back("note: fewer than 10 records over a decade, trend fit skipped");
        }
    }
}

inline void burgers_scenario(const ScenarioConfig& c, const ScenarioSetup& s, Artifacts& art, ScenarioResult& res) {
    std::vector<double> ts(static_cast<std::size_t>(c.decay_t_count));
    const double a = std::log(c.decay_t_min), b = std::log(c.decay_t_max);
    for (std::size_t i = 0; i < ts.size(); ++i)
        ts[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(ts.size() - 1));
    struct Row {
        const char* name;
        double p;
    };
    const Row rows[] = {{"L1", 1.0}, {"L2", 2.0}, {"Linf", std::numeric_limits<double>::infinity()}};
    std::optional<std::ofstream> table;
    if (art.enabled()) {
        table = art.open("decay.csv", "fitted exponents of the rarefaction slope norms");
        *table << "norm,exponent,expected\n";
    }
    for (const auto& row : rows) {
        const RateFit fit = rarefaction_decay_check(*s.rare, row.p, ts);
        const double expected = -1.0 + 1.0 / row.p;
        res.metrics.emplace_back(std::string("exponent_") + row.name, fit.exponent);
        if (table) *table << row.name << ',' << io::fmt17(fit.exponent) << ',' << io::fmt17(expected) << '\n';
        art.series(std::string("slope_") + row.name + ".dat", std::string("t, ") + row.name + " norm of u_x", fit.times,
                   fit.norms);
        if (row.p > 1.0) {
            const double band = 0.15 * -expected;
            res.check(fit.conclusive && std::abs(fit.exponent - expected) <= band,
                      std::string(row.name) + " exponent within 15% of " + io::fmt17(expected));
        }
    }
    if (art.enabled()) {
        std::vector<double> xs;
        for (std::size_t i = 0; i <= 400; ++i) xs.push_back(s.grid.L * static_cast<double>(i) / 400.0);
        for (double t : {0.0, c.decay_t_max}) {
            auto os = art.open("rarefaction_t" + io::fmt17(t) + ".csv", "rarefaction profile at t = " + io::fmt17(t));
            write_rarefaction_csv(os, *s.rare, t, xs);
        }
    }
}

inline void layer_decay_scenario(const ScenarioConfig& c, const ScenarioSetup& s, Artifacts& art,
                                 ScenarioResult& res) {
    const LayerProfile& prof = *s.layer;
    res.metrics.emplace_back("strength", prof.strength());
    if (!prof.exists()) {
        res.check(false, "layer exists (" + prof.message() + ")");
        return;
    }
    if (art.enabled()) {
        auto os = art.open("layer.csv", "sampled boundary layer");
        write_layer_csv(os, prof);
    }
    const double resid = layer_ode_residual(s.gas, prof);
    res.metrics.emplace_back("ode_residual", resid);
    res.metrics.emplace_back("boundary_error", prof.boundary_error);
    res.check(resid <= 1e-6, "ODE residual at most 1e-6");
    if (prof.tag() == LayerCase::transonic_degenerate) {
        const auto rep = measure_decay(prof, DecayWindow{5.0, 1001.0});
        res.metrics.emplace_back("exponent", rep.exponent);
        res.metrics.emplace_back("decades", rep.decades);
        res.metrics.emplace_back("M0", find_M0(prof));
        res.check(rep.kind == DecayKind::algebraic && rep.exponent >= -1.2 && rep.exponent <= -0.8 && rep.decades >= 2.0,
                  "algebraic decay with exponent in [-1.2, -0.8] over two decades");
    } else {
        const auto rep = measure_decay(prof);
        const double oracle = -linearize_layer(s.gas, prof.far()).slowest_stable();
        res.metrics.emplace_back("rate", rep.rate);
        res.metrics.emplace_back("rate_oracle", oracle);
        res.check(rep.kind == DecayKind::exponential && std::abs(rep.rate - oracle) <= 0.1 * oracle,
                  "exponential rate within 10% of the linearisation");
    }
    (void)c;
}

inline void reduced_scenario(const ScenarioConfig& c, const ScenarioSetup& s, Artifacts& art, ScenarioResult& res) {
    const FieldState init = initial_data(s, c);
    const ReductionReport rep = verify_reduction(s.gas, s.end, c.solver, init);
    res.metrics.emplace_back("max_E_error", rep.max_E_error);
    res.metrics.emplace_back("max_b_drift", rep.max_b_drift);
    res.metrics.emplace_back("records", static_cast<double>(rep.records));
    const double tol = c.solver.source == SourceTreatment::integrating_factor ? 1e-6 : 1e-4;
    res.check(rep.max_E_error <= tol, "E matches E(0) exp(-t/eps) to " + io::fmt17(tol));
    res.check(rep.max_b_drift <= 1e-12, "b constant in time to 1e-12");
    if (art.enabled()) {
        auto os = art.open("reduction_table.txt", "case to reduced-system table");
        write_reduction_table(os);
    }
}

} // namespace detail

/// run one scenario; errors are caught and reported with verdict ERROR
inline ScenarioResult run_scenario(const ScenarioConfig& c, bool write_files = true) {
    ScenarioResult res;
    res.scenario = c.scenario;
    res.out_dir = c.out_dir;
    try {
        const ScenarioSetup s = build_setup(c);
        res.warnings = s.warnings;
        res.verdict = Verdict::pass;
        res.metrics.emplace_back("epsilon", s.gas.epsilon);
        res.metrics.emplace_back("dielectric_bound", s.bound.value);
        res.metrics.emplace_back("u_minus", s.end.u_minus);
        res.metrics.emplace_back("theta_minus", s.end.theta_minus);
        if (s.rare) res.metrics.emplace_back("delta_r", s.rare->wave().delta_r());
        if (s.layer) res.metrics.emplace_back("layer_strength", s.layer->strength());
        detail::Artifacts art(c.out_dir, write_files);
        if (write_files) {
            auto os = art.open("config.txt", "configuration echo");
            write_config(os, c);
        }
        switch (c.scenario) {
        case ScenarioId::layer_stability:
        case ScenarioId::rarefaction_stability:
        case ScenarioId::superposition_stability: detail::stability_scenario(c, s, art, res); break;
        case ScenarioId::burgers_decay: detail::burgers_scenario(c, s, art, res); break;
        case ScenarioId::layer_decay: detail::layer_decay_scenario(c, s, art, res); break;
        case ScenarioId::reduced_model_check: detail::reduced_scenario(c, s, art, res); break;
        }
        if (write_files) {
            {
                auto os = art.open("summary.txt", "verdict, checks and metrics");
                os << "scenario = " << to_string(c.scenario) << '\n' << "verdict = " << to_string(res.verdict) << '\n';
                for (const auto& w : res.warnings) os << "warning = " << w << '\n';
                for (const auto& r : res.reasons) os << "check = " << r << '\n';
                for (const auto& [k, v] : res.metrics) os << k << " = " << io::fmt17(v) << '\n';
            }
            art.manifest();
        }
    } catch (const std::exception& e) {
        res.verdict = Verdict::error;
        res.error = e.what();
    }
    return res;
}

/// one batch entry: a parsed config or the reason it could not be loaded
struct BatchItem {
    std::string name;
    std::optional<ScenarioConfig> config;
    std::string load_error;
};

struct BatchEntry {
    std::string name;
    std::string scenario;
    std::string out_dir;
    Verdict verdict = Verdict::error;
    std::string message;
};

/// run the items on `workers` threads; results come back in input order
inline std::vector<BatchEntry> run_batch(const std::vector<BatchItem>& items, unsigned workers) {
    std::vector<BatchEntry> out(items.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            BatchEntry& e = out[i];
            e.name = items[i].name;
            if (!items[i].config) {
                e.message = items[i].load_error;
                continue;
            }
            const ScenarioConfig& c = *items[i].config;
            e.scenario = to_string(c.scenario);
            e.out_dir = c.out_dir;
            const ScenarioResult r = run_scenario(c);
            e.verdict = r.verdict;
            if (r.verdict == Verdict::error) {
                e.message = r.error;
            } else {
                for (const auto& reason : r.reasons)
                    if (reason.rfind("failed", 0) == 0) e.message += (e.message.empty() ? "" : "; ") + reason;
            }
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, items.size()))));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline void write_batch_report(std::ostream& os, const std::vector<BatchEntry>& entries) {
    os << "index,name,scenario,out_dir,verdict,exit_code,message\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        os << i << ',' << csv_field(e.name) << ',' << csv_field(e.scenario) << ',' << csv_field(e.out_dir) << ','
           << to_string(e.verdict) << ',' << exit_code(e.verdict) << ',' << csv_field(e.message) << '\n';
    }
}

} // namespace nsm
