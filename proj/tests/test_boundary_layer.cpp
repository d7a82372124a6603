#include <gtest/gtest.h>

#include <cmath>

#include "nsm/boundary_layer.hpp"

using namespace nsm;

namespace {
const GasParams gas{};
const FluidState supersonic{1.0, -2.0, 1.0};
const FluidState subsonic{1.0, -0.5, 1.0};
const FluidState transonic{1.0, -std::sqrt(5.0 / 3.0), 1.0};
} // namespace

// eigenvalues from a symbolic derivation of the stationary equations
TEST(Linearization, SupersonicEigenvalues) {
    const auto lin = linearize_layer(gas, supersonic);
    EXPECT_NEAR(lin.lambda_lo, -3.5, 1e-12);
    EXPECT_NEAR(lin.lambda_hi, -1.0, 1e-12);
    EXPECT_NEAR(lin.slowest_stable(), -1.0, 1e-12);
}

TEST(Linearization, SubsonicSaddle) {
    const auto lin = linearize_layer(gas, subsonic);
    EXPECT_NEAR(lin.lambda_lo, -1.1301993223490369, 1e-12);
    EXPECT_NEAR(lin.lambda_hi, 1.8801993223490369, 1e-12);
}

TEST(Linearization, TransonicZeroEigenvalue) {
    const auto lin = linearize_layer(gas, transonic);
    EXPECT_NEAR(lin.lambda_lo, -2.4528894525980307, 1e-12);
    EXPECT_NEAR(lin.lambda_hi, 0.0, 1e-12);
}

TEST(LayerOde, VanishesAtFarState) {
    const Vec2 f = layer_ode_rhs(gas, subsonic, subsonic.u, subsonic.theta);
    EXPECT_EQ(f[0], 0.0);
    EXPECT_EQ(f[1], 0.0);
    EXPECT_THROW(layer_ode_rhs(gas, subsonic, 0.0, 1.0), NumericalError);
}

TEST(Layer, SupersonicDeskCase) {
    const auto bd = layer_boundary_point(gas, supersonic, 0.05);
    const auto prof = construct_layer(gas, supersonic, bd);
    ASSERT_TRUE(prof.exists());
    EXPECT_EQ(prof.tag(), LayerCase::supersonic);
    EXPECT_NEAR(prof.strength(), 0.05, 1e-12);
    EXPECT_LE(layer_ode_residual(gas, prof), 1e-6);
    EXPECT_LE(prof.boundary_error, 1e-8);
    const auto rep = measure_decay(prof);
    EXPECT_EQ(rep.kind, DecayKind::exponential);
    EXPECT_NEAR(rep.rate, 1.0, 0.1);
    // mass flux is constant along the layer
    for (std::size_t i = 0; i < prof.xs().size(); i += 50)
        EXPECT_NEAR(prof.rhos()[i] * prof.us()[i], supersonic.rho * supersonic.u, 1e-12);
}

TEST(Layer, SubsonicOnManifoldBothBranches) {
    for (int branch : {1, -1}) {
        const auto bd = layer_boundary_point(gas, subsonic, 0.04, branch);
        const auto prof = construct_layer(gas, subsonic, bd);
        ASSERT_TRUE(prof.exists()) << prof.message();
        EXPECT_EQ(prof.tag(), LayerCase::subsonic);
        EXPECT_LE(prof.boundary_error, 1e-8);
        EXPECT_LE(layer_ode_residual(gas, prof), 1e-6);
        const auto rep = measure_decay(prof);
        EXPECT_NEAR(rep.rate, 1.1301993223490369, 0.1 * 1.13);
    }
}

TEST(Layer, SubsonicOffManifoldIsNonexistent) {
    const auto prof = construct_layer(gas, subsonic, BoundaryData{-0.52, 1.0});
    EXPECT_FALSE(prof.exists());
    EXPECT_EQ(prof.tag(), LayerCase::nonexistent);
    EXPECT_FALSE(prof.message().empty());
}

TEST(Layer, DegenerateTransonicAlgebraicDecay) {
    const auto bd = layer_boundary_point(gas, transonic, 0.05);
    const auto prof = construct_layer(gas, transonic, bd);
    ASSERT_EQ(prof.tag(), LayerCase::transonic_degenerate);
    const auto rep = measure_decay(prof, DecayWindow{5.0, 1001.0});
    EXPECT_EQ(rep.kind, DecayKind::algebraic);
    EXPECT_GE(rep.exponent, -1.2);
    EXPECT_LE(rep.exponent, -0.8);
    EXPECT_GE(rep.decades, 2.0);
    const double M0 = find_M0(prof);
    for (std::size_t i = 0; i < prof.xs().size(); ++i) {
        if (prof.xs()[i] < M0) continue;
        const auto s = prof.slope(prof.xs()[i]);
        EXPECT_GE(s.u, -1e-12);
        EXPECT_GE(s.theta, -1e-12);
    }
}

TEST(Layer, TransonicRepellingSideIsNonexistent) {
    const auto bd = layer_boundary_point(gas, transonic, 0.05, -1);
    EXPECT_FALSE(construct_layer(gas, transonic, bd).exists());
}

TEST(Layer, ZeroStrengthIsConstant) {
    const auto prof = construct_layer(gas, subsonic, BoundaryData{subsonic.u, subsonic.theta});
    ASSERT_TRUE(prof.exists());
    EXPECT_EQ(prof.value(3.0), subsonic);
}

TEST(Layer, InflowFarStateHasNoOutflowLayer) {
    const auto prof = construct_layer(gas, FluidState{1.0, 0.5, 1.0}, BoundaryData{-0.1, 1.0});
    EXPECT_FALSE(prof.exists());
    EXPECT_THROW(construct_layer(gas, FluidState{1.0, 0.0, 1.0}, BoundaryData{-0.1, 1.0}), NumericalError);
}

TEST(Layer, StrengthAboveDelta0IsRejected) {
    LayerOptions o;
    o.max_strength = 0.01;
    const auto bd = layer_boundary_point(gas, supersonic, 0.05, 1, o);
    EXPECT_FALSE(construct_layer(gas, supersonic, bd, o).exists());
}

TEST(Layer, EvaluatorReturnsFarStateBeyondSamples) {
    const auto prof = construct_layer(gas, supersonic, layer_boundary_point(gas, supersonic, 0.05));
    EXPECT_EQ(prof.value(prof.x_max() + 1.0), supersonic);
}
