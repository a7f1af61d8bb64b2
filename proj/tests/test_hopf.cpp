#include <gtest/gtest.h>

#include <random>

#include "hermflow/hopf.hpp"

using namespace hermflow;
using namespace hermflow::hopf;

namespace {

Point random_point(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Point z(static_cast<std::size_t>(n));
    for (auto& c : z) c = {N(rng), N(rng)};
    return z;
}

Point e(int n, int k) {
    Point v(static_cast<std::size_t>(n));
    v[static_cast<std::size_t>(k)] = 1;
    return v;
}

}  // namespace

TEST(Hopf, Validation) {
    EXPECT_THROW(validate({3, 1, -1}), std::invalid_argument);
    EXPECT_THROW(validate({3, 1, -2}), std::invalid_argument);
    EXPECT_THROW(validate({3, 0, 0}), std::invalid_argument);
    EXPECT_THROW(validate({1, 1, 0}), std::invalid_argument);
    EXPECT_NO_THROW(validate({3, 1, -0.99}));
    EXPECT_THROW(metric({2, 1, 0}, {0, 0}), std::invalid_argument);
}

TEST(Hopf, CanonicalMetricIsBismutFlatInDimensionTwo) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) EXPECT_LT(bismut_mixed({2, 1, 0}, random_point(2, rng)).max_abs(), 1e-14);
}

TEST(Hopf, MetricInverse) {
    std::mt19937_64 rng(2);
    const HopfMetric h{4, 1.3, 0.7};
    const Point z = random_point(4, rng);
    const Tensor g = metric(h, z), G = metric_inverse(h, z);
    // sum_k g_{i kbar} g^{j kbar} = delta
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx s{};
            for (int k = 0; k < 4; ++k) s += g(i, k) * G(j, k);
            EXPECT_NEAR(std::abs(s - (i == j ? 1.0 : 0.0)), 0, 1e-12);
        }
}

TEST(Hopf, BisectionalAtTheNorthPole) {
    const Point z{0, 0, 1};
    for (double a : {1.0, 2.0})
        for (double b : {-0.5, 0.0, 0.8}) {
            const double v = bisectional({3, a, b}, z, e(3, 0), e(3, 1)).value;
            EXPECT_NEAR(v, -a - 2 * b, 1e-12);
        }
    EXPECT_NEAR(bisectional({3, 1, -0.5}, z, e(3, 0), e(3, 0)).value, 1.0, 1e-14);
}

TEST(Hopf, SharpnessViolation) {
    for (double eps : {0.1, 0.01}) {
        const Point z{0, 0, cplx(0.6, 0.8) * 1.3};
        const double r2 = norm2(z);
        const double v = bisectional({3, 1, -0.5 + eps}, z, e(3, 0), e(3, 1)).value;
        EXPECT_NEAR(v, -2 * eps / (r2 * r2), 1e-12);
    }
}

TEST(Hopf, RadialDirectionsAreNull) {
    std::mt19937_64 rng(3);
    for (int n : {2, 3, 4}) {
        const Point z = random_point(n, rng), nu = random_point(n, rng);
        Point lz = z;
        for (auto& c : lz) c *= cplx(0.3, -1.1);
        for (double b : {-0.7, 0.0, 2.0}) {
            EXPECT_NEAR(bisectional({n, 1, b}, z, lz, nu).value, 0, 1e-12);
            EXPECT_NEAR(bisectional({n, 1, b}, z, nu, lz).value, 0, 1e-12);
        }
    }
}

TEST(Hopf, HalfIdentity) {
    std::mt19937_64 rng(4);
    for (int n : {3, 4, 5}) {
        const Point z = random_point(n, rng), xi = random_point(n, rng), nu = random_point(n, rng);
        EXPECT_NEAR(bisectional({n, 2, -1}, z, xi, nu).value, half_identity(2, z, xi, nu), 1e-10);
    }
}

TEST(Hopf, BismutRicciIsNegativeOrthogonalToZ) {
    // g_H with n = 3: the trace over nu of the bisectional form is
    // (2 - n)/|z|^4 (|xi|^2 |z|^2 - |xi . z|^2).
    std::mt19937_64 rng(5);
    const int n = 3;
    const Point z = random_point(n, rng), xi = random_point(n, rng);
    const Tensor M = bismut_mixed({n, 1, 0}, z);
    const Tensor G = metric_inverse({n, 1, 0}, z);
    cplx ric{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) ric += M(i, j, k, l) * xi[i] * std::conj(xi[j]) * G(k, l);
    const double r = norm2(z);
    const double expected = (2.0 - n) / (r * r) * (norm2(xi) * r - std::norm(dot(xi, z)));
    EXPECT_NEAR(ric.real(), expected, 1e-10);
    EXPECT_LT(ric.real(), 0);
}

TEST(Hopf, CurvatureSatisfiesCplxByConstruction) {
    std::mt19937_64 rng(6);
    const auto om = bismut_curvature_at({3, 1, 0.4}, random_point(3, rng));
    EXPECT_TRUE(check_cplx(om).satisfied);
    EXPECT_EQ(check_cplx(om).absolute_violation, 0.0);
}

TEST(Hopf, ChernData) {
    const auto cd = chern_data_at({2, 1, 0}, {1, 0});
    EXPECT_NEAR(cd.torsion(0, 1, 1).real(), -1, 1e-14);  // T^2_{12}
    EXPECT_NEAR(cd.gamma(0, 0, 0).real(), -1, 1e-14);    // Gamma^1_{11}

    const auto c3 = chern_data_at({3, 1, 0}, {0, 0, 1});
    EXPECT_NEAR(c3.theta2(0, 0).real(), 2, 1e-14);

    const auto c1 = chern_data_at({3, 1, 1}, {0, 0, 1});
    EXPECT_NEAR(c1.gamma(2, 2, 2).real(), -1, 1e-14);

    // The Q terms vanish as beta -> -alpha.
    auto q = [](double beta) {
        const auto c = chern_data_at({3, 1, beta}, {0.3, 0.5, 1});
        return c.Q1.max_abs() + c.Q2.max_abs() + c.Q3.max_abs() + c.Q4.max_abs();
    };
    EXPECT_LT(q(-0.9999), q(-0.999) / 5);
    EXPECT_LT(q(-0.9999), 1e-3);
}

TEST(Hopf, AssembledTangentMatchesTheOde) {
    const FlowCoefficients grad{0.5, -0.25, -0.5, 1, "gradient"};
    const auto c = verify_general_ode_consistency({3, 1, -0.5}, grad, {0.2, 0.4, 1});
    // gamma + 1 - n + (gamma + 1)(a + 2b + (n-1)d) = 1/2 - 3 + 1
    EXPECT_NEAR(c.alpha_dot, -1.5, 1e-10);
    EXPECT_LT(c.defect, 1e-10);

    const auto p = verify_general_ode_consistency({2, 1, 0}, {1, 0, 0, 0, "pluriclosed"}, {0.7, -0.2});
    EXPECT_NEAR(p.alpha_dot, 0, 1e-12);
    EXPECT_NEAR(p.beta_dot, 0, 1e-12);
    EXPECT_LT(p.span_residual, 1e-12);
}
