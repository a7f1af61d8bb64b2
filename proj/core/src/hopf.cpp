#include "hermflow/hopf.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hermflow/flow.hpp"

namespace hermflow::hopf {

namespace {

double kd(int a, int b) { return a == b ? 1.0 : 0.0; }

Tensor square(int n) { return Tensor({n, n}); }
Tensor cube(int n) { return Tensor({n, n, n}); }
Tensor quartic(int n) {
    return Tensor({n, n, n, n},
                  {AxisKind::holomorphic, AxisKind::antiholomorphic, AxisKind::holomorphic, AxisKind::antiholomorphic});
}

void check_point(const HopfMetric& h, const Point& z) {
    if (static_cast<int>(z.size()) != h.n) throw std::invalid_argument("point dimension differs from n");
    if (norm2(z) == 0) throw std::invalid_argument("the origin is not on the Hopf manifold");
}

}  // namespace

void validate(const HopfMetric& h) {
    if (h.n < 2) throw std::invalid_argument("Hopf metric needs n >= 2");
    if (!(h.alpha > 0)) throw std::invalid_argument("Hopf metric needs alpha > 0");
    if (!(h.beta > -h.alpha)) throw std::invalid_argument("Hopf metric needs beta > -alpha");
}

double norm2(const Point& z) {
    double s = 0;
    for (const auto& c : z) s += std::norm(c);
    return s;
}

cplx dot(const Point& a, const Point& b) {
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

Tensor metric(const HopfMetric& h, const Point& z) {
    validate(h);
    check_point(h, z);
    const double r = norm2(z);
    Tensor g = square(h.n);
    for (int i = 0; i < h.n; ++i)
        for (int j = 0; j < h.n; ++j)
            g(i, j) = h.alpha * kd(i, j) / r + h.beta * std::conj(z[i]) * z[j] / (r * r);
    return g;
}

Tensor metric_inverse(const HopfMetric& h, const Point& z) {
    validate(h);
    check_point(h, z);
    const double r = norm2(z), c = h.beta / (h.alpha + h.beta);
    Tensor G = square(h.n);
    for (int i = 0; i < h.n; ++i)
        for (int j = 0; j < h.n; ++j) G(i, j) = r / h.alpha * (kd(i, j) - c * z[i] * std::conj(z[j]) / r);
    return G;
}

Tensor chern_christoffels(const HopfMetric& h, const Point& z) {
    validate(h);
    check_point(h, z);
    const int n = h.n;
    const double r = norm2(z), g = h.gamma();
    Tensor G = cube(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                G(i, j, k) = (g * kd(i, k) * std::conj(z[j]) - kd(j, k) * std::conj(z[i])) / r -
                             g * std::conj(z[i]) * std::conj(z[j]) * z[k] / (r * r);
    return G;
}

BismutChristoffels bismut_christoffels(const HopfMetric& h, const Point& z) {
    validate(h);
    check_point(h, z);
    const int n = h.n;
    const double r = norm2(z), g = h.gamma();
    BismutChristoffels B{cube(n), cube(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const cplx zbi = std::conj(z[i]), zbj = std::conj(z[j]);
                B.hol(i, j, k) = (g * kd(j, k) * zbi - kd(i, k) * zbj) / r - g * zbi * zbj * z[k] / (r * r);
                // The last term carries z_i, not zbar_i: this is what the defining
                // formula g^{k sbar}(dbar_i g_{j sbar} - dbar_s g_{j ibar}) produces.
                B.anti(i, j, k) = (kd(i, j) * z[k] - (1 + g) * kd(j, k) * z[i]) / r + g * z[i] * zbj * z[k] / (r * r);
            }
    return B;
}

Tensor u_alpha(const Point& z) {
    const int n = static_cast<int>(z.size());
    const double r = norm2(z);
    Tensor U = quartic(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const cplx zbi = std::conj(z[i]), zbk = std::conj(z[k]);
                    U(i, j, k, l) = (kd(i, l) * kd(j, k) - kd(i, j) * kd(k, l)) / (r * r) +
                                    (kd(i, j) * zbk * z[l] + kd(k, l) * zbi * z[j] - kd(i, l) * z[j] * zbk -
                                     kd(j, k) * zbi * z[l]) /
                                        (r * r * r);
                }
    return U;
}

Tensor u_beta(const Point& z) {
    const int n = static_cast<int>(z.size());
    const double r = norm2(z);
    Tensor U = quartic(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const cplx zbi = std::conj(z[i]), zbk = std::conj(z[k]);
                    U(i, j, k, l) = -kd(i, j) * kd(k, l) / (r * r) +
                                    (kd(i, j) * zbk * z[l] + kd(k, l) * zbi * z[j]) / (r * r * r) -
                                    zbi * z[j] * zbk * z[l] / (r * r * r * r);
                }
    return U;
}

Tensor bismut_mixed(const HopfMetric& h, const Point& z) {
    validate(h);
    check_point(h, z);
    Tensor M = u_alpha(z);
    M *= h.alpha;
    Tensor Ub = u_beta(z);
    Ub *= 2 * h.beta;
    M += Ub;
    return M;
}

CurvatureTensor bismut_curvature_at(const HopfMetric& h, const Point& z) {
    return expand_mixed(bismut_mixed(h, z), ConnectionKind::Bismut, SignConvention::standard);
}

double biquadratic(const Tensor& M, const Point& xi, const Point& nu) {
    const int n = M.dim(0);
    cplx s{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx a = xi[static_cast<std::size_t>(i)] * std::conj(xi[static_cast<std::size_t>(j)]);
            if (a == cplx{}) continue;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    s += M(i, j, k, l) * a * nu[static_cast<std::size_t>(k)] *
                         std::conj(nu[static_cast<std::size_t>(l)]);
        }
    return s.real();
}

BisectionalValue bisectional(const HopfMetric& h, const Point& z, const Point& xi, const Point& nu) {
    if (static_cast<int>(xi.size()) != h.n || static_cast<int>(nu.size()) != h.n)
        throw std::invalid_argument("vector dimension differs from n");
    return {biquadratic(bismut_mixed(h, z), xi, nu), z, xi, nu};
}

double half_identity(double alpha, const Point& z, const Point& xi, const Point& nu) {
    const double r = norm2(z);
    return alpha / (r * r * r * r) * std::norm(dot(xi, nu) * r - dot(xi, z) * dot(z, nu));
}

ChernData chern_data_at(const HopfMetric& h, const Point& z) {
    validate(h);
    check_point(h, z);
    const int n = h.n;
    const double r = norm2(z), g = h.gamma();
    ChernData cd;
    cd.gamma = chern_christoffels(h, z);
    const Tensor gm = metric(h, z);

    cd.omega_up = quartic(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const cplx zbi = std::conj(z[i]), zbk = std::conj(z[k]);
                    cd.omega_up(i, j, k, l) =
                        (kd(k, l) * (kd(i, j) - zbi * z[j] / r) - g * kd(i, l) * (kd(j, k) - zbk * z[j] / r) +
                         g * ((kd(j, k) * zbi + kd(i, j) * zbk) * r - 2.0 * zbi * z[j] * zbk) / (r * r) * z[l]) /
                        r;
                }
    cd.omega = quartic(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    cplx s{};
                    for (int m = 0; m < n; ++m) s += cd.omega_up(i, j, k, m) * gm(m, l);
                    cd.omega(i, j, k, l) = s;
                }

    cd.theta2 = square(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cd.theta2(i, j) = ((n - 1 - g) * kd(i, j) + g * (2 * n - 1 + g * (n - 1)) * std::conj(z[i]) * z[j] / r) / r;

    cd.torsion = cube(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                cd.torsion(i, j, k) = (g + 1) * (kd(i, k) * std::conj(z[j]) - kd(j, k) * std::conj(z[i])) / r;
    cd.torsion_lower = cube(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx s{};
                for (int p = 0; p < n; ++p) s += cd.torsion(i, j, p) * gm(p, k);
                cd.torsion_lower(i, j, k) = s;
            }

    const double f2 = (g + 1) * (g + 1), ab = h.alpha / (h.alpha + h.beta), bb = h.beta / (h.alpha + h.beta);
    cd.Q1 = square(n);
    cd.Q2 = square(n);
    cd.Q3 = square(n);
    cd.Q4 = square(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx P = std::conj(z[i]) * z[j] / r;
            cd.Q1(i, j) = f2 / r * (ab * kd(i, j) + (n - 2 + bb) * P);
            cd.Q2(i, j) = 2 * f2 / r * ab * (kd(i, j) - P);
            cd.Q3(i, j) = static_cast<double>((n - 1) * (n - 1)) * f2 * P / r;
            cd.Q4(i, j) = f2 / r * ab * (n - 1) * (kd(i, j) - P);
        }
    return cd;
}

Tensor assembled_tangent(const HopfMetric& h, const FlowCoefficients& fc, const Point& z) {
    const int n = h.n;
    const ChernData cd = chern_data_at(h, z);
    const Tensor G = metric_inverse(h, z);

    // S_{i jbar} = g^{k lbar} Omega_{k lbar i jbar}
    Tensor S = contract(G, cd.omega, {{0, 0}, {1, 1}});

    const Tensor& Tl = cd.torsion_lower;
    Tensor K = square(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx q1{}, q2{}, q3{}, q4{};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q) {
                            const cplx w = G(k, l) * G(p, q);
                            q1 += w * Tl(i, k, q) * std::conj(Tl(j, l, p));
                            q2 += w * Tl(k, p, j) * std::conj(Tl(l, q, i));
                            q3 += w * Tl(i, k, l) * std::conj(Tl(j, q, p));
                            q4 += 0.5 * w * (Tl(p, k, l) * std::conj(Tl(q, j, i)) + Tl(p, i, j) * std::conj(Tl(q, l, k)));
                        }
            K(i, j) = -S(i, j) + fc.a * q1 + fc.b * q2 + fc.c * q3 + fc.d * q4;
        }
    return K;
}

OdeConsistency verify_general_ode_consistency(const HopfMetric& h, const FlowCoefficients& fc, const Point& z) {
    const int n = h.n;
    const Tensor K = assembled_tangent(h, fc, z);
    const double r = norm2(z);

    // Least squares on span{delta/|z|^2, zbar_i z_j/|z|^4}.
    Eigen::MatrixXcd A(n * n, 2);
    Eigen::VectorXcd b(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            A(i * n + j, 0) = kd(i, j) / r;
            A(i * n + j, 1) = std::conj(z[i]) * z[j] / (r * r);
            b(i * n + j) = K(i, j);
        }
    Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
    const double span = (A * x - b).cwiseAbs().maxCoeff();

    OdeConsistency out{};
    out.span_residual = span;
    out.alpha_dot = x(0).real();
    out.beta_dot = x(1).real();
    const auto rates = flow::ode_rhs(h.alpha, h.beta, fc, n);
    out.alpha_dot_ode = rates.alpha_dot;
    out.beta_dot_ode = rates.beta_dot;
    out.defect = std::max({span, std::abs(x(0).imag()), std::abs(x(1).imag()),
                           std::abs(out.alpha_dot - out.alpha_dot_ode), std::abs(out.beta_dot - out.beta_dot_ode)});
    return out;
}

}  // namespace hermflow::hopf
