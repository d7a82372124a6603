#pragma once
/**
 * @brief Flat key=value scenario configuration.
 *
 * One key per line, '#' starts a comment, blank lines are ignored. Every key is
 * optional and has a documented default; unknown keys are errors. The echo writes
 * every key with 17 significant digits so that reloading it gives an identical config.
 */
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nsm/core.hpp"
#include "nsm/io.hpp"
#include "nsm/solver.hpp"

namespace nsm {

enum class ScenarioId {
    layer_stability,
    rarefaction_stability,
    superposition_stability,
    burgers_decay,
    layer_decay,
    reduced_model_check
};

enum class BoundaryMode { explicit_data, manifold };
enum class PerturbationShape { compact_cosine, gaussian };

struct ScenarioConfig {
    ScenarioId scenario = ScenarioId::superposition_stability;
    GasParams gas{};
    /// when positive, epsilon is set to this multiple of the dielectric bound
    double epsilon_factor = 0.0;

    double rho_plus = 1.0;
    double u_plus = -0.5;
    double theta_plus = 1.0;
    BoundaryMode boundary = BoundaryMode::manifold;
    double u_minus = -0.5;
    double theta_minus = 1.0;
    double layer_strength = 0.04;
    int layer_branch = 1;
    double theta_star = 0.9;

    double alpha = 0.1;
    double q = 1.0;
    double delta0 = 0.5;
    double layer_step = 0.02;

    double L = 0.0; ///< 0 selects the default truncation length
    int N = 400;
    SolverConfig solver{};

    PerturbationShape shape = PerturbationShape::compact_cosine;
    double amplitude = 1e-2;
    double center = 5.0;
    double width = 2.0;
    std::string components = "phi,psi,zeta,em";
    std::uint64_t seed = 0;

    std::string out_dir = "out";
    bool snapshots = true;
    int snapshot_stride = 1;
    bool floor_run = true;
    double fluid_ratio = 0.2;
    double em_ratio = 0.1;

    double decay_t_min = 1.0;
    double decay_t_max = 100.0;
    int decay_t_count = 21;

    [[nodiscard]] std::vector<std::string> violations() const;
    friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
};

inline const char* to_string(ScenarioId s) {
    switch (s) {
    case ScenarioId::layer_stability: return "layer_stability";
    case ScenarioId::rarefaction_stability: return "rarefaction_stability";
    case ScenarioId::superposition_stability: return "superposition_stability";
    case ScenarioId::burgers_decay: return "burgers_decay";
    case ScenarioId::layer_decay: return "layer_decay";
    case ScenarioId::reduced_model_check: return "reduced_model_check";
    }
    return "?";
}

namespace detail {

template <class E>
struct EnumName {
    E value;
    const char* name;
};

inline const std::vector<EnumName<ScenarioId>>& scenario_names() {
    static const std::vector<EnumName<ScenarioId>> v{
        {ScenarioId::layer_stability, "layer_stability"},
        {ScenarioId::rarefaction_stability, "rarefaction_stability"},
        {ScenarioId::superposition_stability, "superposition_stability"},
        {ScenarioId::burgers_decay, "burgers_decay"},
        {ScenarioId::layer_decay, "layer_decay"},
        {ScenarioId::reduced_model_check, "reduced_model_check"}};
    return v;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v) {
    if (v.empty()) throw ConfigError("expected a number");
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || errno == ERANGE) throw ConfigError("expected a number, got '" + v + "'");
    return d;
}

inline long long parse_int(const std::string& v) {
    if (v.empty()) throw ConfigError("expected an integer");
    errno = 0;
    char* end = nullptr;
    const long long d = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) throw ConfigError("expected an integer, got '" + v + "'");
    return d;
}

inline std::uint64_t parse_uint(const std::string& v) {
    if (v.empty() || v[0] == '-') throw ConfigError("expected a non-negative integer, got '" + v + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long d = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) throw ConfigError("expected an integer, got '" + v + "'");
    return d;
}

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

struct KeySpec {
    std::string key;
    std::string doc;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <class T>
KeySpec real(const char* key, const char* doc, T ScenarioConfig::*m) {
    return {key, doc, [m](ScenarioConfig& c, const std::string& v) { c.*m = parse_double(v); },
            [m](const ScenarioConfig& c) { return io::fmt17(c.*m); }};
}

template <class F>
KeySpec real_at(const char* key, const char* doc, F access) {
    return {key, doc, [access](ScenarioConfig& c, const std::string& v) { access(c) = parse_double(v); },
            [access](const ScenarioConfig& c) { return io::fmt17(access(const_cast<ScenarioConfig&>(c))); }};
}

template <class E>
KeySpec choice(const char* key, const char* doc, E ScenarioConfig::*m, std::vector<EnumName<E>> names) {
    return {key, doc,
            [m, names](ScenarioConfig& c, const std::string& v) {
                for (const auto& n : names)
                    if (v == n.name) {
                        c.*m = n.value;
                        return;
                    }
                std::string all;
                for (const auto& n : names) all += std::string(all.empty() ? "" : ", ") + n.name;
                throw ConfigError("expected one of {" + all + "}, got '" + v + "'");
            },
            [m, names](const ScenarioConfig& c) {
                for (const auto& n : names)
                    if (c.*m == n.value) return std::string(n.name);
                return std::string("?");
            }};
}

template <class E, class F>
KeySpec choice_at(const char* key, const char* doc, F access, std::vector<EnumName<E>> names) {
    return {key, doc,
            [access, names](ScenarioConfig& c, const std::string& v) {
                for (const auto& n : names)
                    if (v == n.name) {
                        access(c) = n.value;
                        return;
                    }
                std::string all;
                for (const auto& n : names) all += std::string(all.empty() ? "" : ", ") + n.name;
                throw ConfigError("expected one of {" + all + "}, got '" + v + "'");
            },
            [access, names](const ScenarioConfig& c) {
                for (const auto& n : names)
                    if (access(const_cast<ScenarioConfig&>(c)) == n.value) return std::string(n.name);
                return std::string("?");
            }};
}

inline const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> t = [] {
        std::vector<KeySpec> k;
        k.push_back(choice("scenario", "experiment to run", &ScenarioConfig::scenario, scenario_names()));
        k.push_back(real_at("R", "gas constant", [](ScenarioConfig& c) -> double& { return c.gas.R; }));
        k.push_back(real_at("gamma", "adiabatic exponent (> 1)", [](ScenarioConfig& c) -> double& { return c.gas.gamma; }));
        k.push_back(real_at("mu", "viscosity", [](ScenarioConfig& c) -> double& { return c.gas.mu; }));
        k.push_back(real_at("kappa", "heat conductivity", [](ScenarioConfig& c) -> double& { return c.gas.kappa; }));
        k.push_back(real_at("epsilon", "dielectric constant", [](ScenarioConfig& c) -> double& { return c.gas.epsilon; }));
        k.push_back(real("epsilon_factor", "if > 0, epsilon = factor * dielectric bound", &ScenarioConfig::epsilon_factor));
        k.push_back(real("rho_plus", "far-field density", &ScenarioConfig::rho_plus));
        k.push_back(real("u_plus", "far-field velocity", &ScenarioConfig::u_plus));
        k.push_back(real("theta_plus", "far-field temperature", &ScenarioConfig::theta_plus));
        k.push_back(choice("boundary", "explicit: use u_minus/theta_minus; manifold: place them at layer_strength",
                           &ScenarioConfig::boundary,
                           {{BoundaryMode::explicit_data, "explicit"}, {BoundaryMode::manifold, "manifold"}}));
        k.push_back(real("u_minus", "boundary velocity (< 0)", &ScenarioConfig::u_minus));
        k.push_back(real("theta_minus", "boundary temperature", &ScenarioConfig::theta_minus));
        k.push_back(real("layer_strength", "layer strength for boundary = manifold", &ScenarioConfig::layer_strength));
        k.push_back({"layer_branch", "side of the manifold (+1 or -1)",
                     [](ScenarioConfig& c, const std::string& v) { c.layer_branch = static_cast<int>(parse_int(v)); },
                     [](const ScenarioConfig& c) { return std::to_string(c.layer_branch); }});
        k.push_back(real("theta_star", "intermediate temperature (superposition)", &ScenarioConfig::theta_star));
        k.push_back(real("alpha", "rarefaction smoothing parameter in (0, 1)", &ScenarioConfig::alpha));
        k.push_back(real("q", "rarefaction smoothing exponent (>= 1)", &ScenarioConfig::q));
        k.push_back(real("delta0", "largest admissible layer strength", &ScenarioConfig::delta0));
        k.push_back(real("layer_step", "layer sample spacing", &ScenarioConfig::layer_step));
        k.push_back(real("L", "domain length (0 = default)", &ScenarioConfig::L));
        k.push_back({"N", "cell count",
                     [](ScenarioConfig& c, const std::string& v) { c.N = static_cast<int>(parse_int(v)); },
                     [](const ScenarioConfig& c) { return std::to_string(c.N); }});
        k.push_back(real_at("T", "end time", [](ScenarioConfig& c) -> double& { return c.solver.T; }));
        k.push_back(real_at("cfl", "CFL factor", [](ScenarioConfig& c) -> double& { return c.solver.cfl; }));
        k.push_back(real_at("cadence", "record cadence (0 = start and end only)",
                            [](ScenarioConfig& c) -> double& { return c.solver.cadence; }));
        k.push_back({"record_count", "if > 0, number of log-spaced records from record_first to T",
                     [](ScenarioConfig& c, const std::string& v) {
                         c.solver.record_count = static_cast<int>(parse_int(v));
                     },
                     [](const ScenarioConfig& c) { return std::to_string(c.solver.record_count); }});
        k.push_back(real_at("record_first", "first positive log-spaced record time",
                            [](ScenarioConfig& c) -> double& { return c.solver.record_first; }));
        k.push_back(choice_at<FarField>("far_field", "far-field treatment",
                                        [](ScenarioConfig& c) -> FarField& { return c.solver.far_field; },
                                        {{FarField::dirichlet, "dirichlet"}, {FarField::sponge, "sponge"}}));
        k.push_back(real_at("sponge_fraction", "sponge width relative to L",
                            [](ScenarioConfig& c) -> double& { return c.solver.sponge_fraction; }));
        k.push_back(real_at("sponge_rate", "sponge peak rate",
                            [](ScenarioConfig& c) -> double& { return c.solver.sponge_rate; }));
        k.push_back(choice_at<SourceTreatment>(
            "source", "stiff source treatment", [](ScenarioConfig& c) -> SourceTreatment& { return c.solver.source; },
            {{SourceTreatment::integrating_factor, "integrating_factor"}, {SourceTreatment::explicit_rk, "explicit"}}));
        k.push_back(real_at("explicit_source_factor", "dt <= factor * epsilon with the explicit source",
                            [](ScenarioConfig& c) -> double& { return c.solver.explicit_source_factor; }));
        k.push_back({"rho_extrapolation", "boundary density extrapolation order (0 or 1)",
                     [](ScenarioConfig& c, const std::string& v) {
                         c.solver.rho_extrapolation_order = static_cast<int>(parse_int(v));
                     },
                     [](const ScenarioConfig& c) { return std::to_string(c.solver.rho_extrapolation_order); }});
        k.push_back(choice("perturbation_shape", "perturbation bump", &ScenarioConfig::shape,
                           {{PerturbationShape::compact_cosine, "compact_cosine"},
                            {PerturbationShape::gaussian, "gaussian"}}));
        k.push_back(real("amplitude", "perturbation amplitude (>= 0)", &ScenarioConfig::amplitude));
        k.push_back(real("center", "perturbation centre", &ScenarioConfig::center));
        k.push_back(real("width", "perturbation width", &ScenarioConfig::width));
        k.push_back({"components", "perturbed components, comma list of phi, psi, zeta, em",
                     [](ScenarioConfig& c, const std::string& v) { c.components = v; },
                     [](const ScenarioConfig& c) { return c.components; }});
        k.push_back({"seed", "perturbation phase seed (0 = unmodulated)",
                     [](ScenarioConfig& c, const std::string& v) { c.seed = parse_uint(v); },
                     [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
        k.push_back({"out_dir", "output directory",
                     [](ScenarioConfig& c, const std::string& v) { c.out_dir = v; },
                     [](const ScenarioConfig& c) { return c.out_dir; }});
        k.push_back({"snapshots", "write snapshot files",
                     [](ScenarioConfig& c, const std::string& v) { c.snapshots = parse_bool(v); },
                     [](const ScenarioConfig& c) { return std::string(c.snapshots ? "true" : "false"); }});
        k.push_back({"snapshot_stride", "write every k-th record as a snapshot",
                     [](ScenarioConfig& c, const std::string& v) { c.snapshot_stride = static_cast<int>(parse_int(v)); },
                     [](const ScenarioConfig& c) { return std::to_string(c.snapshot_stride); }});
        k.push_back({"floor_run", "also run the unperturbed problem to measure the floor",
                     [](ScenarioConfig& c, const std::string& v) { c.floor_run = parse_bool(v); },
                     [](const ScenarioConfig& c) { return std::string(c.floor_run ? "true" : "false"); }});
        k.push_back(real("fluid_ratio", "pass if fluid sup-norm at T <= ratio * initial", &ScenarioConfig::fluid_ratio));
        k.push_back(real("em_ratio", "pass if field sup-norm at T <= ratio * initial", &ScenarioConfig::em_ratio));
        k.push_back(real("decay_t_min", "first time of the decay fit", &ScenarioConfig::decay_t_min));
        k.push_back(real("decay_t_max", "last time of the decay fit", &ScenarioConfig::decay_t_max));
        k.push_back({"decay_t_count", "number of log-spaced decay-fit times",
                     [](ScenarioConfig& c, const std::string& v) { c.decay_t_count = static_cast<int>(parse_int(v)); },
                     [](const ScenarioConfig& c) { return std::to_string(c.decay_t_count); }});
        return k;
    }();
    return t;
}

} // namespace detail

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    for (const auto& k : detail::key_table())
        if (k.get(a) != k.get(b)) return false;
    return true;
}

inline std::vector<std::string> component_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<std::string> ScenarioConfig::violations() const {
    std::vector<std::string> v;
    GasParams g = gas;
    if (epsilon_factor > 0.0) g.epsilon = 1.0;
    for (auto& s : g.violations()) v.push_back(s);
    if (epsilon_factor < 0.0) v.emplace_back("epsilon_factor must be non-negative");
    if (!(rho_plus > 0.0)) v.emplace_back("rho_plus must be positive");
    if (!(theta_plus > 0.0)) v.emplace_back("theta_plus must be positive");
    if (!(theta_minus > 0.0)) v.emplace_back("theta_minus must be positive");
    const bool layer_scenario = scenario == ScenarioId::layer_stability || scenario == ScenarioId::layer_decay ||
                                scenario == ScenarioId::superposition_stability;
    if (layer_scenario && boundary == BoundaryMode::explicit_data && !(u_minus < 0.0))
        v.emplace_back("u_minus must be negative (outflow)");
    if (!(layer_strength >= 0.0)) v.emplace_back("layer_strength must be non-negative");
    if (layer_branch != 1 && layer_branch != -1) v.emplace_back("layer_branch must be 1 or -1");
    if (scenario == ScenarioId::superposition_stability && !(theta_star > 0.0 && theta_star <= theta_plus))
        v.emplace_back("theta_star must lie in (0, theta_plus]");
    if ((scenario == ScenarioId::rarefaction_stability || scenario == ScenarioId::burgers_decay) &&
        !(theta_minus <= theta_plus))
        v.emplace_back("theta_minus must not exceed theta_plus for a rarefaction");
    if (!(alpha > 0.0 && alpha < 1.0)) v.emplace_back("alpha must lie in (0, 1)");
    if (!(q >= 1.0)) v.emplace_back("q must be at least 1");
    if (!(delta0 > 0.0)) v.emplace_back("delta0 must be positive");
    if (!(layer_step > 0.0)) v.emplace_back("layer_step must be positive");
    if (!(L >= 0.0)) v.emplace_back("L must be non-negative");
    if (N < 16) v.emplace_back("N must be at least 16");
    for (auto& s : solver.violations()) v.push_back(s);
    if (!(amplitude >= 0.0)) v.emplace_back("amplitude must be non-negative");
    if (!(width > 0.0)) v.emplace_back("width must be positive");
    if (!(center >= 0.0)) v.emplace_back("center must be non-negative");
    for (const auto& c : component_list(components))
        if (c != "phi" && c != "psi" && c != "zeta" && c != "em")
            v.push_back("unknown perturbation component '" + c + "'");
    if (out_dir.empty()) v.emplace_back("out_dir must not be empty");
    if (snapshot_stride < 1) v.emplace_back("snapshot_stride must be at least 1");
    if (!(fluid_ratio > 0.0)) v.emplace_back("fluid_ratio must be positive");
    if (!(em_ratio > 0.0)) v.emplace_back("em_ratio must be positive");
    if (!(decay_t_min > 0.0 && decay_t_max > decay_t_min)) v.emplace_back("need 0 < decay_t_min < decay_t_max");
    if (decay_t_count < 3) v.emplace_back("decay_t_count must be at least 3");
    return v;
}

/// parse config text; throws ConfigError naming the line for syntax errors and listing every violated constraint
inline ScenarioConfig parse_config(std::istream& in, const std::string& origin = "<config>") {
    ScenarioConfig c;
    std::map<std::string, const detail::KeySpec*> keys;
    for (const auto& k : detail::key_table()) keys[k.key] = &k;
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (seen.count(key)) throw ConfigError(where + "duplicate key '" + key + "' (first on line " +
                                               std::to_string(seen[key]) + ")");
        seen[key] = lineno;
        try {
            it->second->set(c, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    const auto v = c.violations();
    if (!v.empty()) {
        std::string msg = origin + ": invalid configuration";
        for (const auto& s : v) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
    return c;
}

inline ScenarioConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

/// every key with its value, one per line
inline void write_config(std::ostream& os, const ScenarioConfig& c) {
    for (const auto& k : detail::key_table()) os << k.key << " = " << k.get(c) << '\n';
}

inline std::string config_echo(const ScenarioConfig& c) {
    std::ostringstream os;
    write_config(os, c);
    return os.str();
}

/// documented schema: key, default and description
inline void write_schema(std::ostream& os) {
    const ScenarioConfig def;
    for (const auto& k : detail::key_table()) os << k.key << " = " << k.get(def) << "    # " << k.doc << '\n';
}

} // namespace nsm
