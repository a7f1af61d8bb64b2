#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hermflow/hopf.hpp"
#include "hermflow/oracle.hpp"

using namespace hermflow;
using namespace hermflow::oracle;

namespace {

PointMetricField hopf_field(const hopf::HopfMetric& h, bool closed_form_christoffels) {
    PointMetricField f{h.n, [h](const Point& p) { return hopf::metric(h, p); }, std::nullopt};
    if (closed_form_christoffels)
        f.christoffels = [h](const Point& p) {
            const auto b = hopf::bismut_christoffels(h, p);
            return hermitian_connection(b.hol, b.anti);
        };
    return f;
}

Point random_point(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 1.5) {
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> R(lo, hi);
    Point z(static_cast<std::size_t>(n));
    double s = 0;
    for (auto& c : z) {
        c = {N(rng), N(rng)};
        s += std::norm(c);
    }
    const double r = R(rng) / std::sqrt(s);
    for (auto& c : z) c *= r;
    return z;
}

}  // namespace

TEST(Oracle, FlatMetricHasZeroCurvature) {
    PointMetricField f{2, [](const Point&) { return identity(2); }, std::nullopt};
    const Point z{0.5, cplx(0.1, 0.3)};
    EXPECT_LT(fd_chern_christoffels(f, z).max_abs(), 1e-12);
    EXPECT_LT(fd_curvature(f, z).max_abs(), 1e-9);
}

TEST(Oracle, HopfCanonicalMetricFlatInDimensionTwo) {
    const auto f = hopf_field({2, 1, 0}, true);
    const Tensor om = fd_curvature(f, {1, 0});
    EXPECT_LT(om.max_abs(), 1e-6);
}

TEST(Oracle, ChernChristoffelsMatchClosedForm) {
    const Tensor G = fd_chern_christoffels(hopf_field({2, 1, 0}, false), {1, 0});
    EXPECT_NEAR(G(0, 0, 0).real(), -1, 1e-8);

    const Tensor G3 = fd_chern_christoffels(hopf_field({3, 1, 1}, false), {0, 0, 1});
    EXPECT_NEAR(G3(2, 2, 2).real(), -1, 1e-8);

    std::mt19937_64 rng(1);
    const hopf::HopfMetric h{3, 1.2, 0.4};
    const Point z = random_point(3, rng);
    const Tensor fd = fd_chern_christoffels(hopf_field(h, false), z);
    const Tensor cf = hopf::chern_christoffels(h, z);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(fd(i, j, k) - cf(i, j, k)), 0, 1e-8);
}

TEST(Oracle, BismutChristoffelsMatchClosedForm) {
    std::mt19937_64 rng(2);
    const hopf::HopfMetric h{3, 0.8, -0.3};
    const Point z = random_point(3, rng);
    const Tensor fd = fd_bismut_christoffels(hopf_field(h, false), z);
    const auto b = hopf::bismut_christoffels(h, z);
    EXPECT_LT((fd - hermitian_connection(b.hol, b.anti)).max_abs(), 1e-8);
}

TEST(Oracle, CurvatureOfClosedFormChristoffels) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> A(0.5, 2), B(-0.45, 1.5);
    for (int n : {2, 3, 4})
        for (int k = 0; k < 3; ++k) {
            const double a = A(rng);
            const hopf::HopfMetric hb{n, a, B(rng) * a};
            const Point z = random_point(n, rng);
            const Tensor om = fd_curvature(hopf_field(hb, true), z);
            EXPECT_LT((mixed_block(om, n) - hopf::bismut_mixed(hb, z)).max_abs(), 1e-6);
            EXPECT_LT(max_pure_type(om, n), 1e-6);
        }
}

TEST(Oracle, NestedDifferencesNeedNoClosedForm) {
    const hopf::HopfMetric h{3, 1, -0.5};
    const Point z{0, 0, 1};
    const Tensor om = fd_curvature(hopf_field(h, false), z);
    EXPECT_NEAR(mixed_block(om, 3)(0, 0, 1, 1).real(), 0, 1e-6);
    EXPECT_LT((mixed_block(om, 3) - hopf::bismut_mixed(h, z)).max_abs(), 1e-6);
}

TEST(Oracle, SecondOrderConvergence) {
    const hopf::HopfMetric h{2, 1, 0.5};
    const Point z{cplx(0.7, 0.2), cplx(-0.3, 0.5)};
    const Tensor exact = hopf::chern_christoffels(h, z);
    auto err = [&](double step) {
        const Tensor fd = fd_chern_christoffels(hopf_field(h, false), z, {step, Stencil::second_order});
        double e = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) e = std::max(e, std::abs(fd(i, j, k) - exact(i, j, k)));
        return e;
    };
    const double e1 = err(1e-2), e2 = err(5e-3);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(Oracle, GuardsNearTheOrigin) {
    const auto f = hopf_field({2, 1, 0}, true);
    EXPECT_THROW(fd_curvature(f, {0.01, 0}), StepUnderflow);
    EXPECT_THROW(fd_curvature(f, {1, 0}, {0.5, Stencil::second_order}), StepUnderflow);
}
