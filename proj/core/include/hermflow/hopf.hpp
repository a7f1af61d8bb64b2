#pragma once

#include <vector>

#include "hermflow/flow_coefficients.hpp"
#include "hermflow/invariant.hpp"
#include "hermflow/tensor.hpp"

// Closed forms for g(alpha, beta)_{i jbar} = alpha delta_ij/|z|^2 + beta zbar_i z_j/|z|^4
// on a linear Hopf manifold, in the coordinate frame d/dz^i.
// Curvatures use the standard sign convention (see SignConvention).

namespace hermflow::hopf {

using Point = std::vector<cplx>;

struct HopfMetric {
    int n = 2;
    double alpha = 1;
    double beta = 0;

    double gamma() const { return beta / alpha; }
};

void validate(const HopfMetric& h);
double norm2(const Point& z);
// a . b = sum_i a_i conj(b_i); this is the product in every displayed bisectional identity.
cplx dot(const Point& a, const Point& b);

Tensor metric(const HopfMetric& h, const Point& z);          // g(i, j) = g_{i jbar}
Tensor metric_inverse(const HopfMetric& h, const Point& z);  // G(i, j) = g^{i jbar}

// Chern: nabla_{d_i} d_j = G(i,j,k) d_k
Tensor chern_christoffels(const HopfMetric& h, const Point& z);

// Bismut: hol(i,j,k) for nabla_{d_i} d_j, anti(i,j,k) for nabla_{dbar_i} d_j.
struct BismutChristoffels {
    Tensor hol;
    Tensor anti;
};
BismutChristoffels bismut_christoffels(const HopfMetric& h, const Point& z);

Tensor u_alpha(const Point& z);  // n^4, (i, jbar, k, lbar)
Tensor u_beta(const Point& z);

// Omega^B_{i jbar k lbar} = alpha U_alpha + 2 beta U_beta.
Tensor bismut_mixed(const HopfMetric& h, const Point& z);
CurvatureTensor bismut_curvature_at(const HopfMetric& h, const Point& z);

// Omega(xi, xibar, nu, nubar) for a mixed block M(i,j,k,l).
double biquadratic(const Tensor& M, const Point& xi, const Point& nu);

struct BisectionalValue {
    double value;
    Point z, xi, nu;
};
BisectionalValue bisectional(const HopfMetric& h, const Point& z, const Point& xi, const Point& nu);

// Right-hand side of the identity valid at beta = -alpha/2.
double half_identity(double alpha, const Point& z, const Point& xi, const Point& nu);

struct ChernData {
    Tensor gamma;          // (i,j,k) nabla_{d_i} d_j
    Tensor omega_up;       // Omega_{i jbar k}^l
    Tensor omega;          // Omega_{i jbar k lbar}
    Tensor theta2;         // Theta^(2)_{i jbar}
    Tensor torsion;        // T^k_{ij} as (i,j,k)
    Tensor torsion_lower;  // T_{i j kbar}
    Tensor Q1, Q2, Q3, Q4;
};
ChernData chern_data_at(const HopfMetric& h, const Point& z);

// -S + aQ1 + bQ2 + cQ3 + dQ4 built by contracting the Chern curvature and
// torsion (not from the printed Q and Theta forms).
Tensor assembled_tangent(const HopfMetric& h, const FlowCoefficients& fc, const Point& z);

struct OdeConsistency {
    double span_residual;  // distance of the assembled tangent from span{delta/|z|^2, zbar z/|z|^4}
    double alpha_dot, beta_dot;        // read off the assembled tangent
    double alpha_dot_ode, beta_dot_ode;  // the ODE right-hand sides
    double defect;  // max of all mismatches
};
OdeConsistency verify_general_ode_consistency(const HopfMetric& h, const FlowCoefficients& fc, const Point& z);

}  // namespace hermflow::hopf
