#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "nsm/appendix.hpp"

using namespace nsm;

TEST(ReduceCase, Mapping) {
    EXPECT_EQ(reduce_case(1).system, ReducedSystem::system1);
    EXPECT_FALSE(reduce_case(1).flip_b);
    EXPECT_EQ(reduce_case(2).system, ReducedSystem::system1);
    EXPECT_TRUE(reduce_case(2).flip_b);
    EXPECT_EQ(reduce_case(9).system, ReducedSystem::system5);
    EXPECT_EQ(reduce_case(9).lorentz, "0");
    EXPECT_THROW(reduce_case(0), DomainError);
    EXPECT_THROW(reduce_case(10), DomainError);
}

TEST(ReduceCase, ImageMultiset) {
    std::map<ReducedSystem, int> n;
    for (const auto& c : case_table()) ++n[c.system];
    EXPECT_EQ(n[ReducedSystem::system1], 2);
    EXPECT_EQ(n[ReducedSystem::system2], 2);
    EXPECT_EQ(n[ReducedSystem::system3], 2);
    EXPECT_EQ(n[ReducedSystem::system4], 2);
    EXPECT_EQ(n[ReducedSystem::system5], 1);
}

TEST(ReduceCase, SurvivingEquations) {
    const auto eq = reduce_case(9).em_equations;
    ASSERT_EQ(eq.size(), 3u);
    EXPECT_EQ(eq[0], "eps E_t + E = 0");
    EXPECT_EQ(reduce_case(1).em_equations.size(), 2u);
}

TEST(ReduceCase, TableHasOneRowPerCase) {
    std::ostringstream os;
    write_reduction_table(os);
    const std::string s = os.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 10);
    EXPECT_NE(s.find("system-5"), std::string::npos);
}

TEST(ClosedForm, ElectricField) {
    GasParams p;
    p.epsilon = 1.0;
    EXPECT_EQ(closed_form_E(p, 3.0, 0.0), 3.0);
    EXPECT_NEAR(closed_form_E(p, 1.0, 1.0), 0.36787944117144232160, 1e-15);
    p.epsilon = 0.3;
    EXPECT_NEAR(closed_form_E(p, 2.0, 0.7), closed_form_E(p, 2.0, 0.3) * std::exp(-0.4 / 0.3), 1e-14);
    p.epsilon = 0.0;
    EXPECT_THROW(closed_form_E(p, 1.0, 1.0), DomainError);
}

TEST(ClosedForm, MagneticField) {
    const auto c = closed_form_b(std::vector<double>(11, 0.0), 0.1, 2.0);
    for (double b : c) EXPECT_EQ(b, 2.0);
    // u = -1: b = b0 exp(-x)
    const auto d = closed_form_b(std::vector<double>(101, -1.0), 0.01, 1.0);
    EXPECT_NEAR(d.back(), std::exp(-1.0), 1e-14);
}

TEST(ClosedForm, ZeroBranches) {
    GasParams p;
    p.epsilon = 0.5;
    const std::vector<double> E0(5, 1.0), u0(5, -1.0);
    const auto a = closed_form_fields(p, ReducedSystem::system4, ZeroBranch::b_zero, E0, u0, 0.1, 1.0, 0.5);
    EXPECT_EQ(a.b[3], 0.0);
    EXPECT_NEAR(a.E[3], std::exp(-1.0), 1e-15);
    const auto b = closed_form_fields(p, ReducedSystem::system4, ZeroBranch::E_zero, E0, u0, 0.1, 1.0, 0.5);
    EXPECT_EQ(b.E[3], 0.0);
    EXPECT_NEAR(b.b[4], std::exp(-0.4), 1e-14);
    const auto c = closed_form_fields(p, ReducedSystem::system5, ZeroBranch::b_zero, E0, u0, 0.1, 1.0, 0.5);
    EXPECT_EQ(c.b[4], 1.0);
    EXPECT_THROW(closed_form_fields(p, ReducedSystem::system1, ZeroBranch::b_zero, E0, u0, 0.1, 1.0, 0.5),
                 DomainError);
}

namespace {
FieldState relaxation_data(const Grid1D& g) {
    FieldState s(g);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = g.x(i);
        s.u[i] = -0.5;
        s.E[i] = std::exp(-(x - 4.0) * (x - 4.0));
        s.b[i] = 0.2;
    }
    return s;
}
} // namespace

TEST(VerifyReduction, IntegratingFactor) {
    GasParams p;
    p.epsilon = 0.01;
    EndStates e;
    e.u_plus = e.u_minus = -0.5;
    SolverConfig c;
    c.T = 5.0 * p.epsilon;
    c.cadence = 0.5 * p.epsilon;
    const auto rep = verify_reduction(p, e, c, relaxation_data(Grid1D(10.0, 200)));
    EXPECT_EQ(rep.records, 11u);
    EXPECT_LE(rep.max_E_error, 1e-6);
    EXPECT_LE(rep.max_b_drift, 1e-12);
}

TEST(VerifyReduction, ExplicitSource) {
    GasParams p;
    p.epsilon = 0.01;
    EndStates e;
    e.u_plus = e.u_minus = -0.5;
    SolverConfig c;
    c.T = 5.0 * p.epsilon;
    c.cadence = 0.5 * p.epsilon;
    c.source = SourceTreatment::explicit_rk;
    const auto rep = verify_reduction(p, e, c, relaxation_data(Grid1D(10.0, 200)));
    EXPECT_LE(rep.max_E_error, 1e-4);
    EXPECT_GT(rep.max_E_error, 0.0);
}
