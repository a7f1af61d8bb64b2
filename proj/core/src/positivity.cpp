#include "hermflow/positivity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

namespace hermflow::positivity {

namespace {

using Vec = std::vector<cplx>;

Vec random_unit(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Vec v(static_cast<std::size_t>(n));
    double s = 0;
    for (auto& c : v) {
        c = {N(rng), N(rng)};
        s += std::norm(c);
    }
    s = std::sqrt(s);
    for (auto& c : v) c /= s;
    return v;
}

// Extreme eigenvector of the Hermitian matrix A, returned conjugated so that
// sum A_ij w_i conj(w_j) equals the eigenvalue.
Vec extreme_direction(const Tensor& A, bool smallest, double& herm_defect) {
    const int n = A.dim(0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            herm_defect = std::max(herm_defect, std::abs(A(i, j) - std::conj(A(j, i))));
            m(i, j) = 0.5 * (A(i, j) + std::conj(A(j, i)));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Eigen::VectorXcd x = es.eigenvectors().col(smallest ? 0 : n - 1);
    Vec w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = std::conj(x(i));
    return w;
}

struct Run {
    Witness w;
    bool stationary = false;
    bool monotone = true;
};

// Alternating minimisation of sign * Omega(xi, xibar, nu, nubar).
Run descend(const Tensor& M, Vec nu, bool minimise, const ClassifyOptions& opt, double scale, double& herm) {
    const double sgn = minimise ? 1.0 : -1.0;
    const double step_tol = 1e-13 * std::max(1.0, scale);
    Run r;
    Vec xi = extreme_direction(contract_second_pair(M, nu), minimise, herm);
    double f = sgn * bisectional(M, xi, nu);
    for (int it = 0; it < opt.max_iterations; ++it) {
        nu = extreme_direction(contract_first_pair(M, xi), minimise, herm);
        const double f1 = sgn * bisectional(M, xi, nu);
        xi = extreme_direction(contract_second_pair(M, nu), minimise, herm);
        const double f2 = sgn * bisectional(M, xi, nu);
        if (f1 > f + step_tol || f2 > f1 + step_tol) r.monotone = false;
        const bool done = std::abs(f2 - f) <= step_tol;
        f = f2;
        if (done) {
            r.stationary = true;
            break;
        }
    }
    r.w = {xi, nu, bisectional(M, xi, nu)};
    return r;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Flat: return "flat";
        case Verdict::NonNegative: return "non-negative";
        case Verdict::NonPositive: return "non-positive";
        case Verdict::Indefinite: return "indefinite";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

Tensor contract_second_pair(const Tensor& M, const std::vector<cplx>& nu) {
    const int n = M.dim(0);
    Tensor A({n, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s{};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    s += M(i, j, k, l) * nu[static_cast<std::size_t>(k)] * std::conj(nu[static_cast<std::size_t>(l)]);
            A(i, j) = s;
        }
    return A;
}

Tensor contract_first_pair(const Tensor& M, const std::vector<cplx>& xi) {
    const int n = M.dim(0);
    Tensor B({n, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx a = xi[static_cast<std::size_t>(i)] * std::conj(xi[static_cast<std::size_t>(j)]);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) B(k, l) += M(i, j, k, l) * a;
        }
    return B;
}

double bisectional(const Tensor& M, const std::vector<cplx>& xi, const std::vector<cplx>& nu) {
    const Tensor A = contract_second_pair(M, nu);
    const int n = M.dim(0);
    cplx s{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s += A(i, j) * xi[static_cast<std::size_t>(i)] * std::conj(xi[static_cast<std::size_t>(j)]);
    return s.real();
}

double metric_norm2(const Tensor& h, const Vec& v) {
    cplx s{};
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            s += h(static_cast<int>(i), static_cast<int>(j)) * v[i] * std::conj(v[j]);
    return s.real();
}

// max |M| in a g-unitary frame e'_i = sum_a P(a,i) e_a with P^T h conj(P) = 1.
double unitary_scale(const Tensor& M, const Tensor& h) {
    const int n = M.dim(0);
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H(i, j) = h(i, j);
    const Eigen::MatrixXcd P = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).operatorInverseSqrt().conjugate();
    const Eigen::MatrixXcd Pc = P.conjugate();
    // one index at a time
    Tensor a = M;
    for (int slot = 0; slot < 4; ++slot) {
        Tensor b(std::vector<int>(4, n));
        const Eigen::MatrixXcd& Q = slot % 2 == 0 ? P : Pc;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        int idx[4] = {i, j, k, l};
                        const int out = idx[slot];
                        cplx acc{};
                        for (int x = 0; x < n; ++x) {
                            idx[slot] = x;
                            acc += Q(x, out) * a(idx[0], idx[1], idx[2], idx[3]);
                        }
                        b(i, j, k, l) = acc;
                    }
        a = std::move(b);
    }
    return a.max_abs();
}

SignClassification classify(const Tensor& M, const ClassifyOptions& opt) {
    if (M.rank() != 4 || M.dim(0) != M.dim(1) || M.dim(0) != M.dim(2) || M.dim(0) != M.dim(3))
        throw DimensionError("classify expects an n^4 mixed block");
    if (opt.starts < 1) throw std::invalid_argument("classify needs at least one start");
    const int n = M.dim(0);

    if (opt.metric && (opt.metric->rank() != 2 || opt.metric->dim(0) != n || opt.metric->dim(1) != n))
        throw DimensionError("classify metric must be n x n");

    SignClassification out;
    const double coord_scale = M.max_abs();
    out.scale = opt.metric ? unitary_scale(M, *opt.metric) : coord_scale;
    out.tol = opt.relative_tol * out.scale;
    out.starts = opt.starts;
    if (out.scale <= opt.flat_tol) {
        out.verdict = Verdict::Flat;
        out.tol = opt.flat_tol;
        out.stationary_starts = opt.starts;
        return out;
    }

    std::mt19937_64 rng(opt.seed);
    double herm = 0;
    Witness lo, hi;
    lo.value = INFINITY;
    hi.value = -INFINITY;
    for (int s = 0; s < opt.starts; ++s) {
        const Vec nu0 = random_unit(n, rng);
        Run a = descend(M, nu0, true, opt, coord_scale, herm);
        Run b = descend(M, nu0, false, opt, coord_scale, herm);
        if (opt.metric) {
            for (Run* r : {&a, &b})
                r->w.value /= metric_norm2(*opt.metric, r->w.xi) * metric_norm2(*opt.metric, r->w.nu);
        }
        out.monotone = out.monotone && a.monotone && b.monotone;
        if (a.stationary && b.stationary) ++out.stationary_starts;
        if (a.w.value < lo.value) lo = a.w;
        if (b.w.value > hi.value) hi = b.w;
    }
    out.hermitian_defect = herm;
    out.min_value = lo.value;
    out.max_value = hi.value;
    out.min_witness = lo;
    out.max_witness = hi;

    const bool neg = out.min_value < -out.tol, pos = out.max_value > out.tol;
    if (neg && pos)
        out.verdict = Verdict::Indefinite;
    else if (out.stationary_starts < out.starts)
        out.verdict = Verdict::Indeterminate;
    else if (!neg)
        out.verdict = Verdict::NonNegative;
    else
        out.verdict = Verdict::NonPositive;
    return out;
}

SignClassification classify(const CurvatureTensor& omega, const ClassifyOptions& opt) {
    const CplxReport rep = check_cplx(omega);
    if (!rep.satisfied)
        throw CplxRefused("curvature fails (Cplx); only its (1,1) part could be classified", rep);
    return classify(omega.mixed_block(), opt);
}

double gamma_threshold(int n) {
    if (n < 2) throw std::invalid_argument("gamma threshold needs n >= 2");
    return n == 2 ? 0.0 : -0.5;
}

}  // namespace hermflow::positivity
