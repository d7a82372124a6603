#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nsm/config.hpp"

using namespace nsm;

namespace {
std::string error_of(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}
} // namespace

TEST(Config, EmptyFileGivesDefaults) {
    const ScenarioConfig c = parse_config_string("# nothing but a comment\n\n");
    EXPECT_TRUE(c == ScenarioConfig{});
    EXPECT_EQ(c.scenario, ScenarioId::superposition_stability);
    EXPECT_EQ(c.amplitude, 1e-2);
    EXPECT_EQ(c.center, 5.0);
    EXPECT_EQ(c.width, 2.0);
    EXPECT_EQ(c.shape, PerturbationShape::compact_cosine);
}

TEST(Config, ParsesValuesAndTrailingComments) {
    const ScenarioConfig c = parse_config_string(
        "scenario = layer_decay\n  gamma=1.4   # air\nN = 128\nfar_field = sponge\nsnapshots = false\n");
    EXPECT_EQ(c.scenario, ScenarioId::layer_decay);
    EXPECT_EQ(c.gas.gamma, 1.4);
    EXPECT_EQ(c.N, 128);
    EXPECT_EQ(c.solver.far_field, FarField::sponge);
    EXPECT_FALSE(c.snapshots);
}

TEST(Config, GammaBelowOne) {
    EXPECT_NE(error_of("gamma = 0.9\n").find("gamma must exceed 1"), std::string::npos);
}

TEST(Config, ListsEveryViolation) {
    const std::string e = error_of("gamma = 0.9\nmu = -1\namplitude = -2\n");
    EXPECT_NE(e.find("gamma must exceed 1"), std::string::npos);
    EXPECT_NE(e.find("mu must be positive"), std::string::npos);
    EXPECT_NE(e.find("amplitude must be non-negative"), std::string::npos);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_NE(error_of("N = 10\n\nbogus = 3\n").find(":3: unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(error_of("gamma 1.4\n").find(":1: expected key = value"), std::string::npos);
    EXPECT_NE(error_of("N = 12.5\n").find(":1: N: expected an integer"), std::string::npos);
    EXPECT_NE(error_of("far_field = open\n").find("expected one of {dirichlet, sponge}"), std::string::npos);
    EXPECT_NE(error_of("N = 100\nN = 200\n").find(":2: duplicate key 'N'"), std::string::npos);
}

TEST(Config, EchoRoundTripIsLossless) {
    ScenarioConfig c;
    c.gas.gamma = 1.0 + 1.0 / 3.0;
    c.gas.epsilon = 0.1 + 0.2;
    c.theta_star = 0.93999999999999995;
    c.components = "phi,em";
    c.seed = 123456789012345ULL;
    c.solver.source = SourceTreatment::explicit_rk;
    c.solver.record_count = 7;
    c.solver.T = 50.0;
    c.out_dir = "some/dir";
    const ScenarioConfig d = parse_config_string(config_echo(c));
    EXPECT_TRUE(c == d);
    EXPECT_EQ(d.gas.epsilon, 0.1 + 0.2);
    EXPECT_EQ(config_echo(d), config_echo(c));
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "nsm_config_test.cfg";
    {
        std::ofstream os(path);
        os << "scenario = burgers_decay\nalpha = 0.5\n";
    }
    EXPECT_EQ(load_config(path).alpha, 0.5);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), ConfigError);
}

TEST(Config, UnknownComponentRejected) {
    EXPECT_NE(error_of("components = phi,chi\n").find("unknown perturbation component 'chi'"), std::string::npos);
}

TEST(Config, SchemaListsEveryKey) {
    std::ostringstream os;
    write_schema(os);
    const std::string s = os.str();
    for (const char* k : {"scenario =", "epsilon_factor =", "record_count =", "components =", "decay_t_count ="})
        EXPECT_NE(s.find(k), std::string::npos) << k;
}
