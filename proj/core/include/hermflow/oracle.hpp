#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hermflow/tensor.hpp"

// Brute-force finite differences on C^n \ {0}. Knows nothing about the Hopf closed forms.
namespace hermflow::oracle {

using Point = std::vector<cplx>;
// z -> g_{i jbar}(z), n x n
using MetricFn = std::function<Tensor(const Point&)>;
// z -> Gamma over the complexified coordinate frame (d_1..d_n, dbar_1..dbar_n),
// nabla_{e_A} e_B = Gamma(A,B,C) e_C, (2n)^3
using ChristoffelFn = std::function<Tensor(const Point&)>;

struct PointMetricField {
    int n = 2;
    MetricFn metric;
    std::optional<ChristoffelFn> christoffels;
};

class StepUnderflow : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Points closer to the origin than this are refused.
inline constexpr double kMinRadius = 0.1;

double default_step(const Point& z);  // 1e-5 max(1, |z|)

// Central stencils: second order (3 points) or fourth order (5 points) per real direction.
enum class Stencil { second_order, fourth_order };

struct FdOptions {
    std::optional<double> h;  // default_step(z) when absent
    Stencil stencil = Stencil::second_order;
};

// Central-difference d/dz^a (a < n) or d/dzbar^a (a >= n) of a tensor-valued function.
Tensor fd_derivative(const std::function<Tensor(const Point&)>& f, const Point& z, int a, double h,
                     Stencil stencil = Stencil::second_order);

// Complexified metric g(A,B) built from g_{i jbar}.
Tensor complexified_metric(const Tensor& g);

// Gamma of a connection preserving type from its two n^3 blocks:
// hol(i,j,k): nabla_{d_i} d_j = hol d_k, anti(i,j,k): nabla_{dbar_i} d_j = anti d_k.
Tensor hermitian_connection(const Tensor& hol, const Tensor& anti);

// Chern: nabla_{d_i} d_j = g^{k sbar} d_i g_{j sbar} d_k, nabla_{dbar_i} d_j = 0.
Tensor fd_chern_christoffels(const PointMetricField& field, const Point& z, const FdOptions& opt = {});
// Bismut: g(nabla_{d_i} d_j, dbar_s) = d_j g_{i sbar},
//         g(nabla_{dbar_i} d_j, dbar_s) = dbar_i g_{j sbar} - dbar_s g_{j ibar}.
Tensor fd_bismut_christoffels(const PointMetricField& field, const Point& z, const FdOptions& opt = {});

// Omega(A,B,C,D) = g(R(e_A,e_B)e_C, e_D) with R = [nabla_A, nabla_B] on commuting
// coordinate fields, from the supplied Christoffel functions (falls back to
// finite-difference Bismut Christoffels when none were supplied).
Tensor fd_curvature(const PointMetricField& field, const Point& z, const FdOptions& opt = {});

// Omega_{i jbar k lbar} block of a (2n)^4 curvature.
Tensor mixed_block(const Tensor& omega, int n);

// Largest component with a pure-type first or second pair.
double max_pure_type(const Tensor& omega, int n);

}  // namespace hermflow::oracle
