#include "hermflow/invariant.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

namespace hermflow {

namespace {

const cplx I{0, 1};

void check_index(int v, int n, const char* what) {
    if (v < 1 || v > n)
        throw std::invalid_argument(std::string(what) + " index " + std::to_string(v) + " outside 1.." +
                                    std::to_string(n));
}

Eigen::MatrixXcd to_eigen(const Tensor& t) {
    Eigen::MatrixXcd M(t.dim(0), t.dim(1));
    for (int a = 0; a < t.dim(0); ++a)
        for (int b = 0; b < t.dim(1); ++b) M(a, b) = t(a, b);
    return M;
}

Tensor from_eigen(const Eigen::MatrixXcd& M) {
    Tensor t({static_cast<int>(M.rows()), static_cast<int>(M.cols())});
    for (int a = 0; a < M.rows(); ++a)
        for (int b = 0; b < M.cols(); ++b) t(a, b) = M(a, b);
    return t;
}

// Lower the last index of a (2n)^3 coefficient tensor with g.
Tensor lower_last(const Tensor& G, const Tensor& g) {
    const int N = g.dim(0);
    Tensor out({N, N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int d = 0; d < N; ++d) {
                cplx s{};
                for (int e = 0; e < N; ++e) s += G(a, b, e) * g(e, d);
                out(a, b, d) = s;
            }
    return out;
}

Tensor raise_last(const Tensor& L, const Tensor& gi) {
    const int N = gi.dim(0);
    Tensor out({N, N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) {
                cplx s{};
                for (int d = 0; d < N; ++d) s += L(a, b, d) * gi(d, c);
                out(a, b, c) = s;
            }
    return out;
}

// g^{k lbar} as ginv(k, l) from the holomorphic block of g.
Tensor inverse_hermitian_block(const Tensor& g, int n) {
    Eigen::MatrixXcd h(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) h(k, l) = g(k, n + l);
    Eigen::MatrixXcd hi = h.inverse();
    Tensor out({n, n});
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out(k, l) = hi(l, k);
    return out;
}

MetricCoefficients axpy(const MetricCoefficients& y, double h, const MetricCoefficients& k) {
    return {y.r2 + h * k.r2, y.s2 + h * k.s2, y.t2 + h * k.t2, y.u + h * k.u, y.v + h * k.v, y.z + h * k.z};
}

}  // namespace

StructureEquations::StructureEquations(int n_) : n(n_), C({n_, n_, n_}), D({n_, n_, n_}) {
    if (n_ < 1) throw std::invalid_argument("structure equations need n >= 1");
}

void StructureEquations::add_c(int k, int i, int j, cplx v) {
    check_index(k, n, "form");
    check_index(i, n, "first");
    check_index(j, n, "second");
    if (i == j) throw std::invalid_argument("phi^{ii} vanishes; cannot carry a coefficient");
    C(k - 1, i - 1, j - 1) += v;
    C(k - 1, j - 1, i - 1) -= v;
}

void StructureEquations::add_d(int k, int i, int j, cplx v) {
    check_index(k, n, "form");
    check_index(i, n, "first");
    check_index(j, n, "second");
    D(k - 1, i - 1, j - 1) += v;
}

StructureEquations StructureEquations::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("structure equations: ") + e.what());
    }
    StructureEquations eqs(doc.value("n", 3));
    auto read = [&](const char* key, bool antisym) {
        if (!doc.contains(key)) return;
        for (const auto& row : doc.at(key)) {
            if (!row.is_array() || row.size() < 4 || row.size() > 5)
                throw std::invalid_argument(std::string("structure equations: bad entry in ") + key);
            const int k = row[0].get<int>(), i = row[1].get<int>(), j = row[2].get<int>();
            const cplx v{row[3].get<double>(), row.size() == 5 ? row[4].get<double>() : 0.0};
            if (antisym)
                eqs.add_c(k, i, j, v);
            else
                eqs.add_d(k, i, j, v);
        }
    };
    read("C", true);
    read("D", false);
    return eqs;
}

std::string StructureEquations::to_json() const {
    nlohmann::json doc;
    doc["n"] = n;
    doc["C"] = nlohmann::json::array();
    doc["D"] = nlohmann::json::array();
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i < j && C(k, i, j) != cplx{})
                    doc["C"].push_back({k + 1, i + 1, j + 1, C(k, i, j).real(), C(k, i, j).imag()});
                if (D(k, i, j) != cplx{})
                    doc["D"].push_back({k + 1, i + 1, j + 1, D(k, i, j).real(), D(k, i, j).imag()});
            }
    return doc.dump();
}

double eight_det_xi(const MetricCoefficients& m) {
    const cplx cross = I * std::conj(m.u) * std::conj(m.v) * m.z;
    return m.r2 * m.s2 * m.t2 + 2 * cross.real() -
           (m.r2 * std::norm(m.v) + m.t2 * std::norm(m.u) + m.s2 * std::norm(m.z));
}

std::optional<std::string> admissibility_failure(const MetricCoefficients& m) {
    if (!(m.r2 > 0)) return "r2 > 0";
    if (!(m.s2 > 0)) return "s2 > 0";
    if (!(m.t2 > 0)) return "t2 > 0";
    if (!(m.r2 * m.s2 > std::norm(m.u))) return "r2*s2 > |u|^2";
    if (!(m.r2 * m.t2 > std::norm(m.z))) return "r2*t2 > |z|^2";
    if (!(m.s2 * m.t2 > std::norm(m.v))) return "s2*t2 > |v|^2";
    if (!(eight_det_xi(m) > 0)) return "8 i det(Xi) > 0";
    return std::nullopt;
}

void require_admissible(const MetricCoefficients& m) {
    if (auto f = admissibility_failure(m)) throw AdmissibilityError("metric not positive definite: " + *f + " fails");
}

Tensor hermitian_matrix(const MetricCoefficients& m) {
    Tensor h({3, 3});
    h(0, 0) = m.r2;
    h(1, 1) = m.s2;
    h(2, 2) = m.t2;
    h(0, 1) = -I * m.u;
    h(1, 0) = I * std::conj(m.u);
    h(1, 2) = -I * m.v;
    h(2, 1) = I * std::conj(m.v);
    h(0, 2) = -I * m.z;
    h(2, 0) = I * std::conj(m.z);
    h *= 0.5;
    return h;
}

MetricCoefficients coefficients_from_hermitian(const Tensor& h) {
    MetricCoefficients m;
    m.r2 = 2 * h(0, 0).real();
    m.s2 = 2 * h(1, 1).real();
    m.t2 = 2 * h(2, 2).real();
    m.u = 2.0 * I * h(0, 1);
    m.v = 2.0 * I * h(1, 2);
    m.z = 2.0 * I * h(0, 2);
    return m;
}

Tensor coframe_differentials(const StructureEquations& eqs) {
    const int n = eqs.n, N = 2 * n;
    Tensor dT({N, N, N});
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                dT(k, i, j) = eqs.C(k, i, j);
                dT(k, i, n + j) = eqs.D(k, i, j);
                dT(k, n + j, i) = -eqs.D(k, i, j);
                dT(n + k, n + i, n + j) = std::conj(eqs.C(k, i, j));
                dT(n + k, n + i, j) = std::conj(eqs.D(k, i, j));
                dT(n + k, j, n + i) = -std::conj(eqs.D(k, i, j));
            }
    return dT;
}

namespace {

BracketTable brackets_unchecked(const StructureEquations& eqs) {
    const int N = 2 * eqs.n;
    Tensor dT = coframe_differentials(eqs);
    BracketTable br{eqs.n, Tensor({N, N, N})};
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int k = 0; k < N; ++k) br.c(a, b, k) = -dT(k, a, b);
    return br;
}

}  // namespace

Defect jacobi_defect(const BracketTable& br) {
    const int N = 2 * br.n;
    Defect out;
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b)
            for (int c = b + 1; c < N; ++c)
                for (int f = 0; f < N; ++f) {
                    cplx s{};
                    for (int e = 0; e < N; ++e)
                        s += br.c(a, b, e) * br.c(e, c, f) + br.c(b, c, e) * br.c(e, a, f) +
                             br.c(c, a, e) * br.c(e, b, f);
                    if (std::abs(s) > out.value) {
                        out.value = std::abs(s);
                        out.where = {a, b, c};
                    }
                }
    return out;
}

Tensor invariant_d(const Tensor& form, const BracketTable& br) {
    const int k = form.rank(), N = 2 * br.n;
    std::vector<int> dims(static_cast<std::size_t>(k + 1), N);
    Tensor out(dims);
    std::vector<int> rest(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < out.size(); ++f) {
        auto x = out.unflat(f);
        cplx s{};
        for (int i = 0; i <= k; ++i)
            for (int j = i + 1; j <= k; ++j) {
                int q = 1;
                for (int m = 0; m <= k; ++m)
                    if (m != i && m != j) rest[static_cast<std::size_t>(q++)] = x[static_cast<std::size_t>(m)];
                cplx acc{};
                for (int e = 0; e < N; ++e) {
                    const cplx ce = br.c(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)], e);
                    if (ce == cplx{}) continue;
                    rest[0] = e;
                    acc += ce * form.at(rest);
                }
                s += ((i + j) % 2 ? -1.0 : 1.0) * acc;
            }
        out.values()[f] = s;
    }
    return out;
}

Defect d_squared_defect(const StructureEquations& eqs) {
    const int N = 2 * eqs.n;
    BracketTable br = brackets_unchecked(eqs);
    Tensor dT = coframe_differentials(eqs);
    Defect out;
    for (int K = 0; K < N; ++K) {
        Tensor two({N, N});
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) two(a, b) = dT(K, a, b);
        auto [v, where] = argmax_abs_component(invariant_d(two, br), [](const std::vector<int>&) { return true; });
        if (v > out.value) {
            out.value = v;
            out.where = {K, where[0], where[1], where[2]};
        }
    }
    return out;
}

BracketTable dualize(const StructureEquations& eqs, double tol) {
    BracketTable br = brackets_unchecked(eqs);
    Defect j = jacobi_defect(br);
    if (j.value > tol) {
        std::ostringstream msg;
        msg << "Jacobi identity fails by " << j.value << " on frame triple (" << j.where[0] << "," << j.where[1]
            << "," << j.where[2] << ")";
        throw IntegrabilityError(msg.str());
    }
    return br;
}

Tensor frame_metric(const MetricCoefficients& m) {
    require_admissible(m);
    Tensor h = hermitian_matrix(m);
    const int n = 3;
    Tensor g({2 * n, 2 * n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g(i, n + j) = h(i, j);
            g(n + j, i) = h(i, j);
        }
    return g;
}

std::vector<cplx> complex_structure(int n) {
    std::vector<cplx> J(static_cast<std::size_t>(2 * n), I);
    for (int a = n; a < 2 * n; ++a) J[static_cast<std::size_t>(a)] = -I;
    return J;
}

Tensor fundamental_form(const Tensor& g) {
    const int N = g.dim(0);
    auto J = complex_structure(N / 2);
    Tensor w({N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) w(a, b) = J[static_cast<std::size_t>(a)] * g(a, b);
    return w;
}

Tensor inverse_matrix(const Tensor& g) { return from_eigen(to_eigen(g).inverse()); }

const char* to_string(ConnectionKind k) {
    switch (k) {
        case ConnectionKind::LeviCivita: return "levi-civita";
        case ConnectionKind::Bismut: return "bismut";
        case ConnectionKind::Chern: return "chern";
    }
    return "?";
}

ConnectionCoefficients connection(ConnectionKind kind, const BracketTable& br, const Tensor& g) {
    const int N = 2 * br.n;
    // Koszul on invariant fields: g(nabla_A B, D) = 1/2 (g([A,B],D) - g([B,D],A) + g([D,A],B))
    Tensor cg = lower_last(br.c, g);
    Tensor low({N, N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int d = 0; d < N; ++d) low(a, b, d) = 0.5 * (cg(a, b, d) - cg(b, d, a) + cg(d, a, b));

    if (kind != ConnectionKind::LeviCivita) {
        const Tensor dw = invariant_d(fundamental_form(g), br);
        auto J = complex_structure(br.n);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                for (int d = 0; d < N; ++d) {
                    const cplx ja = J[static_cast<std::size_t>(a)], jb = J[static_cast<std::size_t>(b)],
                               jd = J[static_cast<std::size_t>(d)];
                    // With w(X,Y) = g(JX,Y) on this frame the torsion corrections enter with a
                    // minus sign; the other sign does not preserve types.
                    if (kind == ConnectionKind::Bismut) {
                        const cplx Jdw = -ja * jb * jd * dw(a, b, d);
                        low(a, b, d) -= 0.5 * Jdw;
                    } else {
                        low(a, b, d) -= 0.5 * ja * dw(a, b, d);
                    }
                }
    }
    return {kind, raise_last(low, inverse_matrix(g))};
}

Tensor torsion(const ConnectionCoefficients& conn, const BracketTable& br) {
    const int N = 2 * br.n;
    Tensor T({N, N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) T(a, b, c) = conn.gamma(a, b, c) - conn.gamma(b, a, c) - br.c(a, b, c);
    return T;
}

Tensor CurvatureTensor::mixed_block() const {
    Tensor M({n, n, n, n}, {AxisKind::holomorphic, AxisKind::antiholomorphic, AxisKind::holomorphic,
                            AxisKind::antiholomorphic});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) M(i, j, k, l) = mixed(i, j, k, l);
    return M;
}

CurvatureTensor curvature(const ConnectionCoefficients& conn, const BracketTable& br, const Tensor& g,
                          SignConvention convention) {
    const int N = 2 * br.n;
    const Tensor& G = conn.gamma;
    Tensor R({N, N, N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                for (int f = 0; f < N; ++f) {
                    cplx s{};
                    for (int e = 0; e < N; ++e)
                        s += G(b, c, e) * G(a, e, f) - G(a, c, e) * G(b, e, f) - br.c(a, b, e) * G(e, c, f);
                    R(a, b, c, f) = s;
                }
    const double sign = convention == SignConvention::standard ? 1.0 : -1.0;
    CurvatureTensor out{br.n, conn.kind, convention, Tensor({N, N, N, N})};
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                for (int d = 0; d < N; ++d) {
                    cplx s{};
                    for (int f = 0; f < N; ++f) s += R(a, b, c, f) * g(f, d);
                    out.omega(a, b, c, d) = sign * s;
                }
    return out;
}

CurvatureTensor expand_mixed(const Tensor& M, ConnectionKind kind, SignConvention convention) {
    const int n = M.dim(0), N = 2 * n;
    CurvatureTensor out{n, kind, convention, Tensor({N, N, N, N})};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const cplx v = M(i, j, k, l);
                    out.omega(i, n + j, k, n + l) = v;
                    out.omega(n + j, i, k, n + l) = -v;
                    out.omega(i, n + j, n + l, k) = -v;
                    out.omega(n + j, i, n + l, k) = v;
                }
    return out;
}

CplxReport check_cplx(const CurvatureTensor& om, double tol) {
    const int n = om.n;
    auto pure = [n](const std::vector<int>& x) {
        return ((x[0] < n) == (x[1] < n)) || ((x[2] < n) == (x[3] < n));
    };
    auto [v, where] = argmax_abs_component(om.omega, pure);
    CplxReport r;
    r.absolute_violation = v;
    r.max_violation = v / (1 + om.omega.max_abs());
    r.tolerance = tol;
    r.satisfied = r.max_violation <= tol;
    if (!r.satisfied) r.witness = std::array<int, 4>{where[0], where[1], where[2], where[3]};
    return r;
}

ChernTorsion chern_torsion(const ConnectionCoefficients& conn, const BracketTable& br, const Tensor& g) {
    if (conn.kind != ConnectionKind::Chern) throw std::invalid_argument("chern_torsion needs the Chern connection");
    const int n = br.n;
    Tensor T = torsion(conn, br);
    Tensor low({n, n, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx s{};
                for (int p = 0; p < 2 * n; ++p) s += T(i, j, p) * g(p, n + k);
                low(i, j, k) = s;
            }
    return {T, low};
}

HcfTerms hcf_terms(const StructureEquations& eqs, const MetricCoefficients& m, const FlowCoefficients& fc) {
    const int n = eqs.n;
    BracketTable br = dualize(eqs);
    Tensor g = frame_metric(m);
    auto ch = connection(ConnectionKind::Chern, br, g);
    auto Om = curvature(ch, br, g, SignConvention::standard);
    Tensor gi = inverse_hermitian_block(g, n);
    Tensor Tl = chern_torsion(ch, br, g).lowered;
    Tensor Tc = Tl.conj();

    HcfTerms t{Tensor({n, n}), Tensor({n, n}), Tensor({n, n}), Tensor({n, n}), Tensor({n, n}), Tensor({n, n})};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx S{}, q1{}, q2{}, q3{}, q4{};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const cplx gkl = gi(k, l);
                    if (gkl == cplx{}) continue;
                    S += gkl * Om.mixed(k, l, i, j);
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q) {
                            const cplx w = gkl * gi(p, q);
                            if (w == cplx{}) continue;
                            q1 += w * Tl(i, k, q) * Tc(j, l, p);
                            q2 += w * Tl(k, p, j) * Tc(l, q, i);
                            q3 += w * Tl(i, k, l) * Tc(j, q, p);
                            q4 += 0.5 * w * (Tl(p, k, l) * Tc(q, j, i) + Tl(p, i, j) * Tc(q, l, k));
                        }
                }
            t.S(i, j) = S;
            t.Q1(i, j) = q1;
            t.Q2(i, j) = q2;
            t.Q3(i, j) = q3;
            t.Q4(i, j) = q4;
            t.K(i, j) = -S + fc.a * q1 + fc.b * q2 + fc.c * q3 + fc.d * q4;
        }
    return t;
}

Tensor hcf_tangent(const StructureEquations& eqs, const MetricCoefficients& m, const FlowCoefficients& fc) {
    return hcf_terms(eqs, m, fc).K;
}

MetricCoefficients coefficient_velocity(const Tensor& K) { return coefficients_from_hermitian(K); }

MetricCoefficients invariant_flow_step(const StructureEquations& eqs, const MetricCoefficients& m,
                                       const FlowCoefficients& fc, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("flow step needs dt > 0");
    require_admissible(m);
    auto vel = [&](const MetricCoefficients& y) {
        if (auto f = admissibility_failure(y)) throw ConeExit("flow left admissible cone: " + *f + " fails", 0);
        return coefficient_velocity(hcf_tangent(eqs, y, fc));
    };
    const auto k1 = vel(m);
    const auto k2 = vel(axpy(m, dt / 2, k1));
    const auto k3 = vel(axpy(m, dt / 2, k2));
    const auto k4 = vel(axpy(m, dt, k3));
    MetricCoefficients out = m;
    out = axpy(out, dt / 6, k1);
    out = axpy(out, dt / 3, k2);
    out = axpy(out, dt / 3, k3);
    out = axpy(out, dt / 6, k4);
    if (auto f = admissibility_failure(out)) throw ConeExit("flow left admissible cone: " + *f + " fails", 0);
    return out;
}

InvariantTrajectory integrate_invariant_flow(const StructureEquations& eqs, const MetricCoefficients& m0,
                                             const FlowCoefficients& fc, double t_end, double dt, double dt_min) {
    InvariantTrajectory tr;
    double t = 0;
    MetricCoefficients m = m0;
    tr.t.push_back(t);
    tr.m.push_back(m);
    while (t < t_end - 1e-14) {
        double h = std::min(dt, t_end - t);
        for (;;) {
            try {
                m = invariant_flow_step(eqs, m, fc, h);
                break;
            } catch (const ConeExit&) {
                h /= 2;
                if (h < dt_min) {
                    tr.left_cone = true;
                    tr.exit_time = t;
                    return tr;
                }
            }
        }
        t += h;
        tr.t.push_back(t);
        tr.m.push_back(m);
    }
    return tr;
}

InvariantGeometry::InvariantGeometry(const StructureEquations& e, const MetricCoefficients& mc)
    : eqs(e), m(mc), br(dualize(e)), g(frame_metric(mc)) {
    bismut = connection(ConnectionKind::Bismut, br, g);
    chern = connection(ConnectionKind::Chern, br, g);
    bismut_curvature = curvature(bismut, br, g);
}

double pluriclosed_defect(const BracketTable& br, const Tensor& g) {
    const int N = 2 * br.n;
    Tensor dw = invariant_d(fundamental_form(g), br);
    auto J = complex_structure(br.n);
    Tensor H({N, N, N});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                H(a, b, c) = -J[static_cast<std::size_t>(a)] * J[static_cast<std::size_t>(b)] *
                             J[static_cast<std::size_t>(c)] * dw(a, b, c);
    return invariant_d(H, br).max_abs();
}

}  // namespace hermflow
