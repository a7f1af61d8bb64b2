#include <gtest/gtest.h>

#include <random>

#include "hermflow/catalog.hpp"
#include "hermflow/invariant.hpp"

using namespace hermflow;
using catalog::family;
using catalog::instantiate;

namespace {

const cplx I{0, 1};

InvariantGeometry geometry(const std::string& id, const catalog::Params& p, const MetricCoefficients& m = {}) {
    return InvariantGeometry(instantiate(family(id), p), m);
}

// One admissible parameter point per family.
std::vector<std::pair<std::string, catalog::Params>> sample_points() {
    return {{"Np", {{"rho", 1}}},
            {"Ni", {{"rho", 1}, {"lambda", 0.5}, {"D", cplx(0.2, 0.7)}}},
            {"Nii", {{"rho", 1}, {"B", cplx(0, 0.3)}, {"c", 0.7}}},
            {"Niii", {{"rho", 1}, {"delta", -1}}},
            {"Si", {{"A", cplx(0.6, 0.8)}}},
            {"Sii", {{"x", 0.7}}},
            {"Siii1", {{"sign", -1}}},
            {"Siii2", {}},
            {"Siii3", {}},
            {"Siii4", {{"sign", 1}}},
            {"Siv1", {}},
            {"Siv2", {{"x", 1}}},
            {"Siv3", {{"A", cplx(0.5, 0.8)}}},
            {"Sv", {}}};
}

}  // namespace

TEST(Invariant, TorusIsAbelianAndFlat) {
    const auto geo = geometry("Np", {{"rho", 0}});
    EXPECT_EQ(geo.br.c.max_abs(), 0.0);
    EXPECT_EQ(geo.bismut.gamma.max_abs(), 0.0);
    EXPECT_EQ(geo.chern.gamma.max_abs(), 0.0);
    EXPECT_EQ(connection(ConnectionKind::LeviCivita, geo.br, geo.g).gamma.max_abs(), 0.0);
    const auto rep = check_cplx(geo.bismut_curvature);
    EXPECT_TRUE(rep.satisfied);
    EXPECT_EQ(rep.max_violation, 0.0);
    EXPECT_EQ(chern_torsion(geo.chern, geo.br, geo.g).T.max_abs(), 0.0);
    EXPECT_EQ(hcf_tangent(geo.eqs, geo.m, {0.3, -1, 2, 0.5, ""}).max_abs(), 0.0);
}

TEST(Invariant, IwasawaBracket) {
    const auto geo = geometry("Np", {{"rho", 1}});
    EXPECT_NEAR(geo.br.c(0, 1, 2).real(), -1.0, 1e-15);
    double other = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int k = 0; k < 6; ++k)
                if (!((a == 0 && b == 1 && k == 2) || (a == 1 && b == 0 && k == 2)))
                    other = std::max(other, std::abs(geo.br.c(a, b, k)));
    EXPECT_EQ(other, 0.0);
}

TEST(Invariant, NiiBracketOfZ1WithItsConjugate) {
    const auto geo = geometry("Nii", {{"rho", 1}, {"B", 0}, {"c", 0}});
    for (int k = 0; k < 6; ++k) {
        if (k == 1 || k == 4) continue;
        EXPECT_EQ(std::abs(geo.br.c(0, 3, k)), 0.0) << "component " << k;
    }
    EXPECT_GT(std::abs(geo.br.c(0, 3, 1)) + std::abs(geo.br.c(0, 3, 4)), 0.5);
}

TEST(Invariant, FrameMetricAndAdmissibility) {
    const Tensor g = frame_metric({});
    EXPECT_DOUBLE_EQ(g(0, 3).real(), 0.5);
    EXPECT_DOUBLE_EQ(g(2, 5).real(), 0.5);
    EXPECT_EQ(g(0, 1), cplx(0));
    EXPECT_EQ(g(0, 4), cplx(0));

    MetricCoefficients bad;
    bad.u = 2;
    EXPECT_TRUE(admissibility_failure(bad).has_value());
    EXPECT_THROW(require_admissible(bad), AdmissibilityError);

    MetricCoefficients ok;
    ok.z = 0.5;
    EXPECT_DOUBLE_EQ(eight_det_xi(ok), 0.75);
    EXPECT_FALSE(admissibility_failure(ok).has_value());
}

TEST(Invariant, HermitianMatrixRoundTrip) {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 10; ++k) {
        const auto m = catalog::sample_metric(rng);
        const auto back = coefficients_from_hermitian(hermitian_matrix(m));
        EXPECT_NEAR(back.r2, m.r2, 1e-14);
        EXPECT_NEAR(std::abs(back.u - m.u), 0, 1e-14);
        EXPECT_NEAR(std::abs(back.z - m.z), 0, 1e-14);
    }
}

TEST(Invariant, CalibrationOnNiWithLambdaZero) {
    std::mt19937_64 rng(4);
    for (cplx D : {I, cplx(1), cplx(-1)}) {
        const auto eqs = instantiate(family("Ni"), {{"rho", 0}, {"lambda", 0}, {"D", D}});
        for (int k = 0; k < 5; ++k) {
            auto m = catalog::sample_metric(rng, catalog::MetricSlice::parse({"v", "z", "r2=1"}));
            const InvariantGeometry geo(eqs, m);
            EXPECT_NEAR(geo.bismut_curvature.mixed(0, 0, 0, 0).real(), m.t2, 1e-12);
        }
    }
}

TEST(Invariant, SiAtImaginaryUnitIsBismutFlat) {
    const auto geo = geometry("Si", {{"A", I}});
    EXPECT_LT(geo.bismut_curvature.omega.max_abs(), 1e-14);
}

TEST(Invariant, IwasawaCurvature) {
    const auto geo = geometry("Np", {{"rho", 1}});
    const auto& om = geo.bismut_curvature;
    EXPECT_NEAR(om.mixed(0, 0, 2, 2).real(), 0.5, 1e-14);
    // The determinant is +1/4: swapping Z1 and Z2 (with phi^3 -> -phi^3) fixes the
    // metric and maps Omega_{1 1bar 3 3bar} to Omega_{2 2bar 3 3bar}.
    const double det = (om.mixed(0, 0, 2, 2) * om.mixed(1, 1, 2, 2) - om.mixed(0, 1, 2, 2) * om.mixed(1, 0, 2, 2)).real();
    EXPECT_NEAR(det, 0.25, 1e-14);
    EXPECT_NEAR(om.mixed(1, 1, 2, 2).real(), om.mixed(0, 0, 2, 2).real(), 1e-14);
}

TEST(Invariant, Siii1SoleComponentOnDiagonalMetrics) {
    MetricCoefficients m;
    m.r2 = 1.7;
    m.s2 = 0.6;
    m.t2 = 1.3;
    const auto geo = geometry("Siii1", {{"sign", 1}}, m);
    const Tensor M = geo.bismut_curvature.mixed_block();
    EXPECT_NEAR(M(0, 0, 0, 0).real(), 1.3, 1e-12);
    double rest = 0;
    for (std::size_t k = 1; k < M.size(); ++k) rest = std::max(rest, std::abs(M.values()[k]));
    EXPECT_LT(rest, 1e-12);
}

TEST(Invariant, Siv1AtUnitMetric) {
    const auto& om = geometry("Siv1", {}).bismut_curvature;
    EXPECT_NEAR(om.mixed(0, 0, 0, 0).real(), 0.5, 1e-14);
    const double det = (om.mixed(0, 0, 0, 0) * om.mixed(0, 0, 2, 2) - om.mixed(0, 0, 0, 2) * om.mixed(0, 0, 2, 0)).real();
    EXPECT_NEAR(det, -0.25, 1e-14);
}

TEST(Invariant, CplxFailures) {
    MetricCoefficients m;
    m.v = 0.1;
    const auto nii = check_cplx(geometry("Nii", {{"rho", 1}, {"B", 0}, {"c", 0}}, m).bismut_curvature);
    EXPECT_FALSE(nii.satisfied);
    EXPECT_TRUE(nii.witness.has_value());

    MetricCoefficients s;
    s.r2 = 1.3;
    s.s2 = 0.9;
    s.t2 = 1.7;
    s.u = cplx(0.2, 0.1);
    const auto geo = geometry("Sv", {}, s);
    const auto sv = check_cplx(geo.bismut_curvature);
    EXPECT_FALSE(sv.satisfied);
    EXPECT_NEAR(std::abs(geo.bismut_curvature.omega(0, 1, 2, 3) + (s.r2 * s.s2 - std::norm(s.u)) / (4 * s.t2)), 0,
                1e-12);
}

TEST(Invariant, ChernTorsion) {
    const auto np = geometry("Np", {{"rho", 1}});
    EXPECT_NEAR(chern_torsion(np.chern, np.br, np.g).T(0, 1, 2).real(), 1.0, 1e-14);

    MetricCoefficients m;
    m.r2 = 1.4;
    m.s2 = 0.7;
    m.t2 = 1.9;
    for (cplx A : {cplx(1), cplx(0.6, 0.8)}) {
        const auto si = geometry("Si", {{"A", A}}, m);
        EXPECT_LT(curvature(si.chern, si.br, si.g).omega.max_abs(), 1e-13);
        EXPECT_GT(chern_torsion(si.chern, si.br, si.g).T.max_abs(), 0.1);
    }
    // Diagonal metrics are Kaehler at A = i.
    const auto kahler = geometry("Si", {{"A", I}}, m);
    EXPECT_LT(chern_torsion(kahler.chern, kahler.br, kahler.g).T.max_abs(), 1e-14);
}

TEST(Invariant, TorsionSymmetriesAcrossFamilies) {
    std::mt19937_64 rng(8);
    for (const auto& [id, p] : sample_points()) {
        const auto eqs = instantiate(family(id), p);
        for (int k = 0; k < 3; ++k) {
            const InvariantGeometry geo(eqs, catalog::sample_metric(rng));
            const int N = 6;
            const Tensor T = torsion(geo.bismut, geo.br);
            Tensor low({N, N, N});
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b)
                    for (int d = 0; d < N; ++d) {
                        cplx s{};
                        for (int c = 0; c < N; ++c) s += T(a, b, c) * geo.g(c, d);
                        low(a, b, d) = s;
                    }
            double skew = 0;
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b)
                    for (int c = 0; c < N; ++c) {
                        skew = std::max(skew, std::abs(low(a, b, c) + low(b, a, c)));
                        skew = std::max(skew, std::abs(low(a, b, c) + low(a, c, b)));
                    }
            EXPECT_LT(skew, 1e-9) << id;

            const Tensor Tc = chern_torsion(geo.chern, geo.br, geo.g).T;
            double mixed = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int c = 0; c < N; ++c) mixed = std::max(mixed, std::abs(Tc(i, 3 + j, c)));
            EXPECT_LT(mixed, 1e-9) << id;
        }
    }
}

TEST(Invariant, HcfTangentStructure) {
    const FlowCoefficients fc{0.5, -0.25, -0.5, 1, "gradient"};
    MetricCoefficients m;
    m.r2 = 1.2;
    m.s2 = 0.8;
    m.t2 = 1.5;
    const Tensor K = hcf_tangent(instantiate(family("Ni"), {{"rho", 0}, {"lambda", 0}, {"D", I}}), m, fc);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) EXPECT_LT(std::abs(K(i, j)), 1e-12);

    std::mt19937_64 rng(6);
    const auto slice = catalog::MetricSlice::parse({"v"});
    const auto nii = instantiate(family("Nii"), {{"rho", 1}, {"B", 0}, {"c", 0}});
    for (int k = 0; k < 5; ++k) {
        const auto vel = coefficient_velocity(hcf_tangent(nii, catalog::sample_metric(rng, slice), fc));
        EXPECT_LT(std::abs(vel.v), 1e-12);
    }
}

TEST(Invariant, FlowStepInvariants) {
    const FlowCoefficients fc{1, 0, 0, 0, "pluriclosed"};
    MetricCoefficients m;
    m.r2 = 1.3;
    m.s2 = 0.6;
    m.t2 = 1.1;
    m.u = cplx(0.1, 0.2);
    const auto torus = instantiate(family("Np"), {{"rho", 0}});
    const auto same = invariant_flow_step(torus, m, fc, 0.01);
    EXPECT_EQ(same.r2, m.r2);
    EXPECT_EQ(same.u, m.u);

    MetricCoefficients d;
    d.r2 = 1.3;
    d.s2 = 0.6;
    d.t2 = 1.1;
    const auto siii1 = instantiate(family("Siii1"), {{"sign", 1}});
    auto x = d;
    for (int k = 0; k < 50; ++k) x = invariant_flow_step(siii1, x, fc, 0.01);
    EXPECT_EQ(std::abs(x.u) + std::abs(x.v) + std::abs(x.z), 0.0);

    const auto si = instantiate(family("Si"), {{"A", I}});
    const auto tr = integrate_invariant_flow(si, d, fc, 0.2, 0.01);
    for (const auto& mm : tr.m) EXPECT_LT(InvariantGeometry(si, mm).bismut_curvature.omega.max_abs(), 1e-12);
}

TEST(Invariant, StructureEquationChecks) {
    StructureEquations bad(3);
    bad.add_c(1, 1, 2, 1);
    bad.add_c(2, 2, 3, 1);
    EXPECT_GT(d_squared_defect(bad).value, 0.1);
    EXPECT_THROW(dualize(bad), IntegrabilityError);

    const auto eqs = instantiate(family("Sii"), {{"x", 0.7}});
    const auto back = StructureEquations::from_json(eqs.to_json());
    EXPECT_LT((back.C - eqs.C).max_abs() + (back.D - eqs.D).max_abs(), 1e-15);
}

TEST(Invariant, ConventionsAreNegatives) {
    const auto geo = geometry("Ni", {{"rho", 1}, {"lambda", 0.5}, {"D", cplx(0.2, 0.7)}});
    const auto std_form = curvature(geo.bismut, geo.br, geo.g, SignConvention::standard);
    EXPECT_LT((std_form.omega + geo.bismut_curvature.omega).max_abs(), 1e-14);
}
