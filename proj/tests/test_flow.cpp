#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hermflow/flow.hpp"

using namespace hermflow;
using namespace hermflow::flow;

TEST(Flow, NamedFlows) {
    const auto g = named_flow("gradient");
    EXPECT_EQ(g.a, 0.5);
    EXPECT_EQ(g.b, -0.25);
    EXPECT_EQ(g.c, -0.5);
    EXPECT_EQ(g.d, 1);
    const auto p = named_flow("pluriclosed");
    EXPECT_EQ(p.a, 1);
    EXPECT_EQ(p.b + p.c + p.d, 0);
    const auto u = named_flow("ustinovskiy");
    EXPECT_EQ(u.b, -0.5);
    EXPECT_THROW(named_flow("ricci"), std::invalid_argument);
    EXPECT_EQ(flow_names().size(), 3u);
}

TEST(Flow, Scalars) {
    for (int n = 2; n <= 10; ++n) {
        const auto g = scalars(named_flow("gradient"), n);
        EXPECT_DOUBLE_EQ(g.F, -n * (n - 1) / 2.0);
        EXPECT_DOUBLE_EQ(*g.static_ratio, -(n - 1.0) / (n + 1.0));
        EXPECT_DOUBLE_EQ(scalars(named_flow("pluriclosed"), n).F, n - 2);
        EXPECT_DOUBLE_EQ(scalars(named_flow("ustinovskiy"), n).F, 1);
    }
    EXPECT_DOUBLE_EQ(*scalars(named_flow("gradient"), 2).static_ratio, -1.0 / 3);
    EXPECT_DOUBLE_EQ(*scalars(named_flow("pluriclosed"), 2).static_ratio, 0);
    // F >= n has no static metric.
    EXPECT_FALSE(scalars({0, -2, 0, 0, ""}, 3).static_ratio.has_value());
}

TEST(Flow, RightHandSides) {
    const auto g = named_flow("gradient");
    EXPECT_NEAR(ode_rhs(1, -0.5, g, 3).alpha_dot, -1.5, 1e-15);
    const auto p = ode_rhs(1, 0, named_flow("pluriclosed"), 2);
    EXPECT_NEAR(p.alpha_dot, 0, 1e-15);
    EXPECT_NEAR(p.beta_dot, 0, 1e-15);
    EXPECT_NEAR(ode_rhs(1, -1 + 1e-12, {0.3, 0.7, -1, 2, ""}, 4).alpha_dot, -4, 1e-9);
    EXPECT_THROW(ode_rhs(1, -1, g, 3), InadmissibleState);
}

TEST(Flow, GammaRateMatchesQuotientRule) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1, 1), A(0.1, 3), G(-0.95, 3);
    for (int k = 0; k < 10000; ++k) {
        const FlowCoefficients fc{U(rng), U(rng), U(rng), U(rng), ""};
        const int n = 2 + static_cast<int>(rng() % 6);
        const double a = A(rng), gam = G(rng);
        const auto r = ode_rhs(a, gam * a, fc, n);
        const double quotient = (r.beta_dot - gam * r.alpha_dot) / a;
        const double closed = gamma_rate(a, gam, fc, n);
        ASSERT_NEAR(quotient, closed, 1e-10 * (1 + std::abs(closed)));
    }
}

TEST(Flow, StaticMetricIsHomothetic) {
    for (const auto& name : flow_names()) {
        const auto fc = named_flow(name);
        const double s = *scalars(fc, 3).static_ratio;
        const auto tr = integrate(1, s, fc, 3, 10, 1e-3);
        for (double g : tr.gamma) EXPECT_NEAR(g, s, 1e-9) << name;
    }
}

TEST(Flow, GradientConvergesToStaticRatio) {
    const auto tr = integrate(1, 0, named_flow("gradient"), 3, 10, 1e-3);
    EXPECT_NEAR(tr.gamma.back(), -0.5, 1e-3);
}

TEST(Flow, UstinovskiyLeavesTheNonNegativeCone) {
    const auto fc = named_flow("ustinovskiy");
    EXPECT_GT(gamma_rate(1, -0.5, fc, 3), 0);
    const auto tr = integrate(1, -0.5, fc, 3, 1, 1e-3);
    EXPECT_EQ(tr.termination, Termination::left_admissible_cone);
    for (std::size_t k = 1; k < tr.gamma.size(); ++k) {
        EXPECT_GT(tr.gamma[k], tr.gamma[k - 1]);
        EXPECT_LT(tr.gamma[k], 0.5);
    }
    EXPECT_NEAR(tr.gamma.back(), 0.5, 1e-3);
}

TEST(Flow, Preservation) {
    for (int n = 2; n <= 8; ++n) {
        EXPECT_TRUE(preserves_nonnegativity(named_flow("gradient"), n).preserved);
        EXPECT_EQ(preserves_nonnegativity(named_flow("pluriclosed"), n).preserved, n == 2);
        EXPECT_FALSE(preserves_nonnegativity(named_flow("ustinovskiy"), n).preserved);
    }
}

TEST(Flow, Rk4FourthOrder) {
    const auto fc = named_flow("gradient");
    auto end = [&](double dt) { return integrate(1, 0.3, fc, 3, 0.2, dt).alpha.back(); };
    const double ref = end(1e-5);
    const double e1 = std::abs(end(0.02) - ref), e2 = std::abs(end(0.01) - ref);
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
}

TEST(Flow, CsvAndStride) {
    IntegrateOptions opt;
    opt.stride = 100;
    const auto tr = integrate(1, 0, named_flow("pluriclosed"), 2, 1, 1e-3, opt);
    EXPECT_EQ(tr.t.size(), 11u);
    const auto csv = trajectory_csv(tr);
    EXPECT_EQ(csv.rfind("t,alpha,beta,gamma\n", 0), 0u);
    EXPECT_EQ(tr.termination, Termination::reached_t_end);
}

TEST(Flow, ConeExitIsReported) {
    // The canonical metric shrinks linearly under the gradient flow.
    const auto tr = integrate(1, 0, named_flow("gradient"), 3, 10, 1e-3);
    EXPECT_EQ(tr.termination, Termination::left_admissible_cone);
    EXPECT_GT(tr.exit_time, 0);
    EXPECT_LT(tr.exit_time, 10);
}
