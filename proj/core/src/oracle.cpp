#include "hermflow/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace hermflow::oracle {

namespace {

double radius(const Point& z) {
    double s = 0;
    for (const auto& c : z) s += std::norm(c);
    return std::sqrt(s);
}

void guard(const Point& z, double h) {
    const double r = radius(z);
    if (r < kMinRadius) throw StepUnderflow("point too close to the origin (|z| = " + std::to_string(r) + ")");
    if (!(h > 0) || h > 0.1 * r) throw StepUnderflow("finite-difference step out of range");
}

// G(k, s) = g^{k sbar}, i.e. sum_s G(k,s) g(m,s) = delta_km.
Tensor inverse_transpose(const Tensor& g) {
    const int n = g.dim(0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(j, i);
    const Eigen::MatrixXcd inv = m.inverse();
    Tensor G({n, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = inv(i, j);
    return G;
}

}  // namespace

double default_step(const Point& z) { return 1e-5 * std::max(1.0, radius(z)); }

Tensor fd_derivative(const std::function<Tensor(const Point&)>& f, const Point& z, int a, double h,
                     Stencil stencil) {
    const int n = static_cast<int>(z.size());
    const auto p = static_cast<std::size_t>(a % n);
    const bool bar = a >= n;
    auto shifted = [&](cplx dir, double s) {
        Point q = z;
        q[p] += s * h * dir;
        return f(q);
    };
    auto partial = [&](cplx dir) {
        if (stencil == Stencil::second_order) {
            Tensor d = shifted(dir, 1);
            d -= shifted(dir, -1);
            d *= 1.0 / (2 * h);
            return d;
        }
        Tensor d = shifted(dir, 1) - shifted(dir, -1);
        d *= 8.0;
        d -= shifted(dir, 2);
        d += shifted(dir, -2);
        d *= 1.0 / (12 * h);
        return d;
    };
    Tensor dx = partial(1.0);
    Tensor dy = partial(cplx(0, 1));
    // d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2
    dy *= bar ? cplx(0, 1) : cplx(0, -1);
    dx += dy;
    dx *= 0.5;
    return dx;
}

Tensor complexified_metric(const Tensor& g) {
    const int n = g.dim(0);
    Tensor G({2 * n, 2 * n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            G(i, n + j) = g(i, j);
            G(n + j, i) = g(i, j);
        }
    return G;
}

Tensor hermitian_connection(const Tensor& hol, const Tensor& anti) {
    const int n = hol.dim(0);
    Tensor G({2 * n, 2 * n, 2 * n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                G(i, j, k) = hol(i, j, k);
                G(n + i, j, k) = anti(i, j, k);
                G(n + i, n + j, n + k) = std::conj(hol(i, j, k));
                G(i, n + j, n + k) = std::conj(anti(i, j, k));
            }
    return G;
}

Tensor fd_chern_christoffels(const PointMetricField& field, const Point& z, const FdOptions& opt) {
    const double step = opt.h.value_or(default_step(z));
    guard(z, step);
    const int n = field.n;
    const Tensor Ginv = inverse_transpose(field.metric(z));
    Tensor hol({n, n, n}), anti({n, n, n});
    for (int i = 0; i < n; ++i) {
        const Tensor dg = fd_derivative(field.metric, z, i, step, opt.stencil);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx s{};
                for (int q = 0; q < n; ++q) s += Ginv(k, q) * dg(j, q);
                hol(i, j, k) = s;
            }
    }
    return hermitian_connection(hol, anti);
}

Tensor fd_bismut_christoffels(const PointMetricField& field, const Point& z, const FdOptions& opt) {
    const double step = opt.h.value_or(default_step(z));
    guard(z, step);
    const int n = field.n;
    const Tensor Ginv = inverse_transpose(field.metric(z));
    std::vector<Tensor> d, db;
    for (int a = 0; a < n; ++a) {
        d.push_back(fd_derivative(field.metric, z, a, step, opt.stencil));
        db.push_back(fd_derivative(field.metric, z, n + a, step, opt.stencil));
    }
    Tensor hol({n, n, n}), anti({n, n, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx sh{}, sa{};
                for (int q = 0; q < n; ++q) {
                    sh += Ginv(k, q) * d[static_cast<std::size_t>(j)](i, q);
                    sa += Ginv(k, q) * (db[static_cast<std::size_t>(i)](j, q) - db[static_cast<std::size_t>(q)](j, i));
                }
                hol(i, j, k) = sh;
                anti(i, j, k) = sa;
            }
    return hermitian_connection(hol, anti);
}

Tensor fd_curvature(const PointMetricField& field, const Point& z, const FdOptions& opt) {
    const int n = field.n, N = 2 * n;
    const double step = opt.h.value_or(default_step(z));
    guard(z, step);

    ChristoffelFn gamma;
    if (field.christoffels) {
        gamma = *field.christoffels;
    } else {
        // Nested differences lose accuracy; use a coarser inner step.
        const FdOptions inner{std::sqrt(step) * 1e-2, opt.stencil};
        gamma = [&field, inner](const Point& p) { return fd_bismut_christoffels(field, p, inner); };
    }

    const Tensor G0 = gamma(z);
    std::vector<Tensor> dG;
    for (int a = 0; a < N; ++a) dG.push_back(fd_derivative(gamma, z, a, step, opt.stencil));

    Tensor R({N, N, N, N});  // R(A,B,C,E) = R^E_{ABC}
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int E = 0; E < N; ++E) {
                    cplx s = dG[static_cast<std::size_t>(A)](B, C, E) - dG[static_cast<std::size_t>(B)](A, C, E);
                    for (int D = 0; D < N; ++D) s += G0(B, C, D) * G0(A, D, E) - G0(A, C, D) * G0(B, D, E);
                    R(A, B, C, E) = s;
                }

    const Tensor g = complexified_metric(field.metric(z));
    Tensor omega({N, N, N, N});
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int F = 0; F < N; ++F) {
                    cplx s{};
                    for (int E = 0; E < N; ++E) s += R(A, B, C, E) * g(E, F);
                    omega(A, B, C, F) = s;
                }
    return omega;
}

Tensor mixed_block(const Tensor& omega, int n) {
    Tensor M({n, n, n, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) M(i, j, k, l) = omega(i, n + j, k, n + l);
    return M;
}

double max_pure_type(const Tensor& omega, int n) {
    const int N = 2 * n;
    double m = 0;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int D = 0; D < N; ++D) {
                    const bool first_pure = (A < n) == (B < n);
                    const bool second_pure = (C < n) == (D < n);
                    if (first_pure || second_pure) m = std::max(m, std::abs(omega(A, B, C, D)));
                }
    return m;
}

}  // namespace hermflow::oracle
