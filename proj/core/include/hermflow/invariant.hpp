#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermflow/flow_coefficients.hpp"
#include "hermflow/tensor.hpp"

namespace hermflow {

// Structure equations of an invariant coframe phi^1..phi^n:
//   d phi^k = sum_{i<j} C[k][i][j] phi^{ij} + sum_{i,j} D[k][i][j] phi^{i jbar}
// C is stored fully (antisymmetric in i,j). Indices are 0-based in storage.
struct StructureEquations {
    int n = 3;
    Tensor C;
    Tensor D;

    explicit StructureEquations(int n = 3);

    // 1-based helpers mirroring the printed tables.
    void add_c(int k, int i, int j, cplx v);
    void add_d(int k, int i, int j, cplx v);

    static StructureEquations from_json(const std::string& text);
    std::string to_json() const;
};

// Coefficients of the invariant Hermitian form
//   2w = i(r2 phi^{11bar} + s2 phi^{22bar} + t2 phi^{33bar})
//        + u phi^{12bar} - ubar phi^{21bar} + v phi^{23bar} - vbar phi^{32bar}
//        + z phi^{13bar} - zbar phi^{31bar}
struct MetricCoefficients {
    double r2 = 1, s2 = 1, t2 = 1;
    cplx u{}, v{}, z{};
};

class AdmissibilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IntegrabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConeExit : public std::runtime_error {
public:
    ConeExit(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

// 8 i det(Xi) = r2 s2 t2 + 2 Re(i ubar vbar z) - (r2|v|^2 + t2|u|^2 + s2|z|^2).
double eight_det_xi(const MetricCoefficients& m);
// Name of the first failed positivity inequality, or nullopt.
std::optional<std::string> admissibility_failure(const MetricCoefficients& m);
void require_admissible(const MetricCoefficients& m);

// h[i][j] = g(Z_i, Zbar_j), 3x3 Hermitian.
Tensor hermitian_matrix(const MetricCoefficients& m);
MetricCoefficients coefficients_from_hermitian(const Tensor& h);

// Structure constants over the complexified frame A = 0..n-1 (Z), n..2n-1 (Zbar):
// [e_A, e_B] = c(A,B,K) e_K.
struct BracketTable {
    int n = 3;
    Tensor c;
};

// d theta^K(e_A, e_B) as a (2n)^3 tensor, index order (K, A, B).
Tensor coframe_differentials(const StructureEquations& eqs);

struct Defect {
    double value = 0;
    std::vector<int> where;
};

Defect jacobi_defect(const BracketTable& br);
Defect d_squared_defect(const StructureEquations& eqs);

// dalpha(X,Y) = -alpha([X,Y]) for invariant forms.
BracketTable dualize(const StructureEquations& eqs, double tol = 1e-10);

// Exterior derivative of an invariant k-form given as a rank-k tensor on the frame.
Tensor invariant_d(const Tensor& form, const BracketTable& br);

// g over the complexified frame: g(Z_i, Zbar_j) = h[i][j], g(Z,Z) = 0.
Tensor frame_metric(const MetricCoefficients& m);
// Diagonal of J on the complexified frame: +i on Z, -i on Zbar.
std::vector<cplx> complex_structure(int n);
// w(X,Y) = g(JX, Y)
Tensor fundamental_form(const Tensor& g);
Tensor inverse_matrix(const Tensor& g);

enum class ConnectionKind { LeviCivita, Bismut, Chern };
const char* to_string(ConnectionKind k);

// nabla_{e_A} e_B = gamma(A,B,C) e_C
struct ConnectionCoefficients {
    ConnectionKind kind = ConnectionKind::LeviCivita;
    Tensor gamma;
};

ConnectionCoefficients connection(ConnectionKind kind, const BracketTable& br, const Tensor& g);

// T(A,B,C) with T(e_A,e_B) = T(A,B,C) e_C.
Tensor torsion(const ConnectionCoefficients& conn, const BracketTable& br);

// standard:  Omega(A,B,C,D) = g(R(e_A,e_B)e_C, e_D), R = [nabla,nabla] - nabla_[,]
// appendix:  the negative of standard; the fixture coefficients and the
//            classification verdicts use this sign.
enum class SignConvention { standard, appendix };

struct CurvatureTensor {
    int n = 3;
    ConnectionKind kind = ConnectionKind::Bismut;
    SignConvention convention = SignConvention::appendix;
    Tensor omega;

    // Omega_{i jbar k lbar} with 0-based holomorphic positions.
    cplx mixed(int i, int j, int k, int l) const { return omega(i, n + j, k, n + l); }
    // n^4 tensor M(i,j,k,l) = Omega_{i jbar k lbar}.
    Tensor mixed_block() const;
};

CurvatureTensor curvature(const ConnectionCoefficients& conn, const BracketTable& br, const Tensor& g,
                          SignConvention convention = SignConvention::appendix);

// Fill a complexified-frame tensor from its mixed block using antisymmetry in each pair and reality.
CurvatureTensor expand_mixed(const Tensor& mixed, ConnectionKind kind, SignConvention convention);

struct CplxReport {
    bool satisfied = true;
    double max_violation = 0;  // relative: max pure-type |Omega| / (1 + max |Omega|)
    double absolute_violation = 0;
    std::optional<std::array<int, 4>> witness;
    double tolerance = kZeroTolerance;
};

CplxReport check_cplx(const CurvatureTensor& omega, double tol = kZeroTolerance);

struct ChernTorsion {
    Tensor T;        // (2n)^3, T(A,B,C)
    Tensor lowered;  // n^3, T_{i j kbar}
};

ChernTorsion chern_torsion(const ConnectionCoefficients& conn, const BracketTable& br, const Tensor& g);

// Everything that enters the invariant HCF; all n x n, index (i, jbar).
struct HcfTerms {
    Tensor S, Q1, Q2, Q3, Q4, K;
};

HcfTerms hcf_terms(const StructureEquations& eqs, const MetricCoefficients& m, const FlowCoefficients& fc);
Tensor hcf_tangent(const StructureEquations& eqs, const MetricCoefficients& m, const FlowCoefficients& fc);
// d/dt of the six coefficients induced by the tangent.
MetricCoefficients coefficient_velocity(const Tensor& K);

// One RK4 step; throws ConeExit if the result is not admissible.
MetricCoefficients invariant_flow_step(const StructureEquations& eqs, const MetricCoefficients& m,
                                       const FlowCoefficients& fc, double dt);

struct InvariantTrajectory {
    std::vector<double> t;
    std::vector<MetricCoefficients> m;
    bool left_cone = false;
    double exit_time = 0;
};

// RK4 with step halving on admissibility failure (floor dt_min).
InvariantTrajectory integrate_invariant_flow(const StructureEquations& eqs, const MetricCoefficients& m0,
                                             const FlowCoefficients& fc, double t_end, double dt = 1e-3,
                                             double dt_min = 1e-6);

// Bundles brackets, metric, connections and curvatures for one (eqs, m).
struct InvariantGeometry {
    StructureEquations eqs;
    MetricCoefficients m;
    BracketTable br;
    Tensor g;
    ConnectionCoefficients bismut, chern;
    CurvatureTensor bismut_curvature;  // appendix convention

    InvariantGeometry(const StructureEquations& e, const MetricCoefficients& mc);
};

// max |d(J dw)|; zero exactly for pluriclosed metrics.
double pluriclosed_defect(const BracketTable& br, const Tensor& g);

}  // namespace hermflow
