#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "nsm/scenario.hpp"

using namespace nsm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "nsm_scenario_tests" / name;
    fs::remove_all(p);
    return p;
}

ScenarioConfig quick(ScenarioId id, const fs::path& out) {
    ScenarioConfig c;
    c.scenario = id;
    c.epsilon_factor = 0.5;
    c.u_plus = -0.5;
    c.theta_star = 0.94;
    c.theta_minus = 0.94;
    c.layer_strength = 0.04;
    c.N = 200;
    c.solver.T = 5.0;
    c.solver.record_count = 12;
    c.solver.record_first = 0.25;
    c.snapshot_stride = 4;
    c.out_dir = out.string();
    return c;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[fs::relative(e.path(), root).string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return files;
}

} // namespace

TEST(Setup, SuperpositionEndStates) {
    const ScenarioSetup s = build_setup(quick(ScenarioId::superposition_stability, scratch("setup")));
    ASSERT_TRUE(s.end.star.has_value());
    ASSERT_TRUE(s.layer && s.rare && s.profile);
    EXPECT_EQ(s.layer->far(), *s.end.star);
    EXPECT_EQ(s.rare->left(), *s.end.star);
    EXPECT_NEAR(s.gas.epsilon, 0.5 * s.bound.value, 1e-18);
    EXPECT_LE(s.rare->wave().delta_r(), 0.2);
    EXPECT_LE(s.layer->strength(), 0.05);
    EXPECT_TRUE(s.warnings.empty());
}

TEST(Setup, WarnsWhenEpsilonIsNotBelowTheBound) {
    ScenarioConfig c = quick(ScenarioId::layer_stability, scratch("warn"));
    c.epsilon_factor = 0.0;
    c.gas.epsilon = 1.0;
    const ScenarioSetup s = build_setup(c);
    ASSERT_EQ(s.warnings.size(), 1u);
    EXPECT_NE(s.warnings[0].find("dielectric bound"), std::string::npos);
}

TEST(InitialData, CompatibilityAtTheBoundary) {
    for (auto id : {ScenarioId::layer_stability, ScenarioId::rarefaction_stability,
                    ScenarioId::superposition_stability}) {
        for (std::uint64_t seed : {0ULL, 99ULL}) {
            for (auto shape : {PerturbationShape::compact_cosine, PerturbationShape::gaussian}) {
                ScenarioConfig c = quick(id, scratch("compat"));
                c.seed = seed;
                c.shape = shape;
                c.center = 1.0;
                const ScenarioSetup s = build_setup(c);
                const FieldState f = initial_data(s, c);
                const CompatibilityReport r = compatibility(s.gas, s.end, f);
                EXPECT_LE(r.u, 1e-14);
                EXPECT_LE(r.theta, 1e-14);
                EXPECT_LE(r.em, 1e-14);
            }
        }
    }
}

TEST(InitialData, ComponentSelection) {
    ScenarioConfig c = quick(ScenarioId::layer_stability, scratch("components"));
    c.components = "zeta";
    const ScenarioSetup s = build_setup(c);
    const FieldState f = initial_data(s, c);
    const Perturbation d = perturb(f, *s.profile);
    const std::size_t i = static_cast<std::size_t>(c.center / s.grid.dx());
    EXPECT_GT(d.zeta[i], 0.5 * c.amplitude);
    EXPECT_EQ(d.psi[i], 0.0);
    EXPECT_EQ(f.E[i], 0.0);
}

TEST(Bump, VanishesAtTheBoundary) {
    EXPECT_EQ(bump(PerturbationShape::compact_cosine, 0.0, 5.0, 2.0), 0.0);
    EXPECT_EQ(bump(PerturbationShape::gaussian, 0.0, 5.0, 2.0), 0.0);
    EXPECT_EQ(bump(PerturbationShape::compact_cosine, 5.0, 5.0, 2.0), 1.0);
    EXPECT_EQ(bump(PerturbationShape::compact_cosine, 7.5, 5.0, 2.0), 0.0);
}

TEST(RunScenario, ZeroAmplitudePasses) {
    ScenarioConfig c = quick(ScenarioId::superposition_stability, scratch("zero"));
    c.amplitude = 0.0;
    const ScenarioResult r = run_scenario(c);
    EXPECT_EQ(r.verdict, Verdict::pass) << r.error;
    EXPECT_EQ(r.exit_code(), 0);
}

TEST(RunScenario, PerturbedSuperpositionPassesAndWritesArtifacts) {
    const fs::path out = scratch("superposition");
    ScenarioConfig c = quick(ScenarioId::superposition_stability, out);
    c.solver.T = 20.0;
    c.N = 400;
    c.solver.record_count = 20;
    const ScenarioResult r = run_scenario(c);
    ASSERT_EQ(r.verdict, Verdict::pass) << r.error;
    EXPECT_EQ(*r.metric("max_boundary_identity"), 0.0);
    EXPECT_LE(*r.metric("max_mass_residual"), 1e-6);
    for (const char* f : {"config.txt", "records.csv", "summary.txt", "manifest.txt", "sup_phi.dat", "final_u.dat",
                          "snapshots/snap_00000.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    // the echo reloads to the same config
    EXPECT_TRUE(load_config(out / "config.txt") == c);
}

TEST(RunScenario, BurgersDecayTable) {
    const fs::path out = scratch("burgers");
    ScenarioConfig c;
    c.scenario = ScenarioId::burgers_decay;
    c.u_plus = 6.5;
    c.theta_plus = 9.6;
    c.theta_minus = 1.35;
    c.alpha = 0.5;
    c.out_dir = out.string();
    const ScenarioResult r = run_scenario(c);
    ASSERT_EQ(r.verdict, Verdict::pass) << r.error;
    EXPECT_NEAR(*r.metric("exponent_Linf"), -1.0, 0.15);
    EXPECT_NEAR(*r.metric("exponent_L2"), -0.5, 0.075);
    std::ifstream in(out / "decay.csv");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_NE(all.find("L2,"), std::string::npos);
    EXPECT_NE(all.find("Linf,"), std::string::npos);
}

TEST(RunScenario, LayerDecayReportsNonexistence) {
    ScenarioConfig c;
    c.scenario = ScenarioId::layer_decay;
    c.boundary = BoundaryMode::explicit_data;
    c.u_minus = -0.52;
    c.theta_minus = 1.0;
    c.out_dir = scratch("nolayer").string();
    const ScenarioResult r = run_scenario(c);
    EXPECT_EQ(r.verdict, Verdict::fail);
    EXPECT_EQ(r.exit_code(), 1);
}

TEST(RunScenario, ReducedModel) {
    ScenarioConfig c;
    c.scenario = ScenarioId::reduced_model_check;
    c.gas.epsilon = 0.01;
    c.N = 200;
    c.solver.T = 0.05;
    c.solver.cadence = 0.005;
    c.out_dir = scratch("reduced").string();
    const ScenarioResult r = run_scenario(c);
    ASSERT_EQ(r.verdict, Verdict::pass) << r.error;
    EXPECT_LE(*r.metric("max_E_error"), 1e-6);
}

TEST(RunScenario, ErrorsAreReportedAsExitCodeTwo) {
    ScenarioConfig c = quick(ScenarioId::superposition_stability, scratch("error"));
    c.theta_star = 2.0;  // above theta_plus: no rarefaction
    const ScenarioResult r = run_scenario(c);
    EXPECT_EQ(r.verdict, Verdict::error);
    EXPECT_EQ(r.exit_code(), 2);
    EXPECT_FALSE(r.error.empty());
}

TEST(Batch, SingleItemMatchesRunScenario) {
    const fs::path a = scratch("single_a"), b = scratch("single_b");
    const ScenarioResult direct = run_scenario(quick(ScenarioId::layer_stability, a));
    const auto entries = run_batch({{"one", quick(ScenarioId::layer_stability, b), ""}}, 1);
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_EQ(entries[0].verdict, direct.verdict) << entries[0].message;
    auto fa = read_tree(a), fb = read_tree(b);
    fa.erase("config.txt");
    fb.erase("config.txt");  // differs only in out_dir
    EXPECT_EQ(fa, fb);
}

TEST(Batch, IdenticalConfigsGiveBitIdenticalOutputs) {
    std::vector<BatchItem> items;
    for (int k = 0; k < 3; ++k)
        items.push_back({"run" + std::to_string(k),
                         quick(ScenarioId::superposition_stability, scratch("ident" + std::to_string(k))), ""});
    const auto entries = run_batch(items, 3);
    for (const auto& e : entries) EXPECT_NE(e.verdict, Verdict::error) << e.message;
    auto ref = read_tree(fs::temp_directory_path() / "nsm_scenario_tests" / "ident0");
    ref.erase("config.txt");
    ASSERT_FALSE(ref.empty());
    for (int k = 1; k < 3; ++k) {
        auto t = read_tree(fs::temp_directory_path() / "nsm_scenario_tests" / ("ident" + std::to_string(k)));
        t.erase("config.txt");
        EXPECT_EQ(t, ref);
    }
}

TEST(Batch, InvalidEntriesAreIsolated) {
    std::vector<BatchItem> items;
    items.push_back({"good", quick(ScenarioId::layer_stability, scratch("iso_good")), ""});
    items.push_back({"bad", std::nullopt, "bad.cfg:1: unknown key 'x'"});
    ScenarioConfig broken = quick(ScenarioId::superposition_stability, scratch("iso_broken"));
    broken.theta_star = 5.0;
    items.push_back({"broken", broken, ""});
    const auto entries = run_batch(items, 2);
    ASSERT_EQ(entries.size(), 3u);
    EXPECT_NE(entries[0].verdict, Verdict::error);
    EXPECT_EQ(entries[1].verdict, Verdict::error);
    EXPECT_EQ(entries[1].message, "bad.cfg:1: unknown key 'x'");
    EXPECT_EQ(entries[2].verdict, Verdict::error);
    std::ostringstream os;
    write_batch_report(os, entries);
    EXPECT_NE(os.str().find("2,broken,superposition_stability"), std::string::npos);
}
