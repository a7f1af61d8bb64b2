#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermflow/invariant.hpp"
#include "hermflow/tensor.hpp"

// Sign of the bisectional form Omega(xi, xibar, nu, nubar) over unit (xi, nu).
namespace hermflow::positivity {

enum class Verdict { Flat, NonNegative, NonPositive, Indefinite, Indeterminate };
const char* to_string(Verdict v);

struct Witness {
    std::vector<cplx> xi, nu;  // unit in the coordinate frame
    double value = 0;          // divided by |xi|_g^2 |nu|_g^2 when a metric is given
};

struct SignClassification {
    Verdict verdict = Verdict::Indeterminate;
    double min_value = 0;
    double max_value = 0;
    std::optional<Witness> min_witness, max_witness;
    double tol = 0;
    double scale = 0;             // max |M|
    double hermitian_defect = 0;  // worst |A(nu) - A(nu)^H| seen
    int stationary_starts = 0;
    int starts = 0;
    bool monotone = true;         // no half-step ever raised the objective
};

struct ClassifyOptions {
    int starts = 64;
    std::uint64_t seed = 0x5eed;
    int max_iterations = 2000;
    double relative_tol = 1e-7;  // verdict tolerance = relative_tol * max |M|
    double flat_tol = 1e-9;      // absolute; below this the tensor is flat
    // h(i,j) = g(e_i, ebar_j). When set, witness values and the tolerance refer to
    // g-unit vectors; the descent itself still runs in the coordinate frame.
    std::optional<Tensor> metric;
};

class CplxRefused : public std::runtime_error {
public:
    CplxRefused(const std::string& what, CplxReport r) : std::runtime_error(what), report(r) {}
    CplxReport report;
};

// M(i,j,k,l) = Omega_{i jbar k lbar}.
SignClassification classify(const Tensor& mixed, const ClassifyOptions& opt = {});
// Refuses tensors that fail (Cplx).
SignClassification classify(const CurvatureTensor& omega, const ClassifyOptions& opt = {});

// A(nu)_{ij} = sum_kl M(i,j,k,l) nu_k conj(nu_l)
Tensor contract_second_pair(const Tensor& mixed, const std::vector<cplx>& nu);
// B(xi)_{kl} = sum_ij M(i,j,k,l) xi_i conj(xi_j)
Tensor contract_first_pair(const Tensor& mixed, const std::vector<cplx>& xi);

double bisectional(const Tensor& mixed, const std::vector<cplx>& xi, const std::vector<cplx>& nu);

// Largest beta/alpha with g(alpha, beta) Bismut-Griffiths-non-negative on the Hopf manifold.
double gamma_threshold(int n);

}  // namespace hermflow::positivity
