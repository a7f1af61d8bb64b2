#include "hermflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hermflow/positivity.hpp"

namespace hermflow::flow {

FlowScalars scalars(const FlowCoefficients& fc, int n) {
    if (n < 2) throw std::invalid_argument("flow scalars need n >= 2");
    const double m = n - 1;
    FlowScalars s;
    s.F = (n - 2) * fc.a - 2 * fc.b + m * m * fc.c - m * fc.d;
    s.L = 1 + fc.a + 2 * fc.b + m * fc.d;
    if (s.F < n) s.static_ratio = s.F / (n - s.F);
    return s;
}

Rates ode_rhs(double alpha, double beta, const FlowCoefficients& fc, int n) {
    if (!(alpha > 0) || !(beta > -alpha))
        throw InadmissibleState("state outside alpha > 0, beta > -alpha");
    const double g = beta / alpha, m = n - 1;
    const double lin = fc.a + 2 * fc.b + m * fc.d;
    Rates r;
    r.alpha_dot = g + 1 - n + (g + 1) * lin;
    r.beta_dot = g * (1 - 2 * n - g * m) + (g + 1) * (g + 1) * m * (fc.a + m * fc.c) - (g + 1) * lin;
    return r;
}

double gamma_rate(double alpha, double gamma, const FlowCoefficients& fc, int n) {
    const double F = scalars(fc, n).F;
    return (gamma + 1) * ((F - n) * gamma + F) / alpha;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::reached_t_end: return "reached_t_end";
        case Termination::left_admissible_cone: return "left_admissible_cone";
        case Termination::converged: return "converged";
    }
    return "?";
}

namespace {

constexpr double kCollapse = 1e-9;
constexpr double kStepFraction = 0.02;

}  // namespace

FlowTrajectory integrate(double alpha0, double beta0, const FlowCoefficients& fc, int n, double t_end,
                         double dt, const IntegrateOptions& opt) {
    if (!(t_end > 0) || !(dt > 0)) throw std::invalid_argument("integrate needs t_end > 0 and dt > 0");
    if (!(alpha0 > 0) || !(beta0 > -alpha0)) throw InadmissibleState("start outside alpha > 0, beta > -alpha");
    const auto sc = scalars(fc, n);
    FlowTrajectory tr;
    auto push = [&](double t, double a, double b) {
        tr.t.push_back(t);
        tr.alpha.push_back(a);
        tr.beta.push_back(b);
        tr.gamma.push_back(b / a);
    };
    double t = 0, a = alpha0, b = beta0;
    push(t, a, b);
    int close = 0;
    long step = 0;
    const int stride = opt.stride < 1 ? 1 : opt.stride;
    while (t < t_end - 1e-12) {
        if (a < kCollapse * alpha0) {
            tr.termination = Termination::left_admissible_cone;
            tr.exit_time = t;
            if (tr.t.back() != t) push(t, a, b);
            return tr;
        }
        // gamma moves on the time scale alpha/|alpha_dot|; a fixed step overshoots near collapse.
        const double shrink = -ode_rhs(a, b, fc, n).alpha_dot;
        const double h = std::min({dt, t_end - t, shrink > 0 ? kStepFraction * a / shrink : dt});
        bool out = false;
        auto rhs = [&](double x, double y) -> Rates {
            if (!(x > 0) || !(y > -x)) {
                out = true;
                return {0, 0};
            }
            return ode_rhs(x, y, fc, n);
        };
        const auto k1 = rhs(a, b);
        const auto k2 = rhs(a + h / 2 * k1.alpha_dot, b + h / 2 * k1.beta_dot);
        const auto k3 = rhs(a + h / 2 * k2.alpha_dot, b + h / 2 * k2.beta_dot);
        const auto k4 = rhs(a + h * k3.alpha_dot, b + h * k3.beta_dot);
        const double na = a + h / 6 * (k1.alpha_dot + 2 * k2.alpha_dot + 2 * k3.alpha_dot + k4.alpha_dot);
        const double nb = b + h / 6 * (k1.beta_dot + 2 * k2.beta_dot + 2 * k3.beta_dot + k4.beta_dot);
        if (out || !(na > 0) || !(nb > -na)) {
            if (tr.t.back() != t) push(t, a, b);
            tr.termination = Termination::left_admissible_cone;
            tr.exit_time = t;
            return tr;
        }
        a = na;
        b = nb;
        t += h;
        ++step;
        if (step % stride == 0) push(t, a, b);
        if (opt.stop_on_convergence && sc.static_ratio) {
            close = std::abs(b / a - *sc.static_ratio) < opt.convergence_tol ? close + 1 : 0;
            if (close >= opt.convergence_window) {
                if (tr.t.back() != t) push(t, a, b);
                tr.termination = Termination::converged;
                return tr;
            }
        }
    }
    if (tr.t.back() != t) push(t, a, b);
    return tr;
}

Preservation preserves_nonnegativity(const FlowCoefficients& fc, int n) {
    const double gn = positivity::gamma_threshold(n);
    const double bound = n * gn / (gn + 1);
    const double F = scalars(fc, n).F;
    return {F <= bound, bound - F, bound};
}

FlowCoefficients named_flow(const std::string& name) {
    if (name == "gradient") return {0.5, -0.25, -0.5, 1, name};
    if (name == "pluriclosed") return {1, 0, 0, 0, name};
    // Only the b term of F is dimension free, so F = 1 for every n forces (0, -1/2, 0, 0).
    if (name == "ustinovskiy") return {0, -0.5, 0, 0, name};
    throw std::invalid_argument("unknown flow '" + name + "' (known: gradient, pluriclosed, ustinovskiy)");
}

std::vector<std::string> flow_names() { return {"gradient", "pluriclosed", "ustinovskiy"}; }

std::string trajectory_csv(const FlowTrajectory& tr) {
    std::ostringstream os;
    os << "t,alpha,beta,gamma\n";
    char buf[128];
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g,%.15g,%.15g,%.15g\n", tr.t[k], tr.alpha[k], tr.beta[k], tr.gamma[k]);
        os << buf;
    }
    return os.str();
}

}  // namespace hermflow::flow
