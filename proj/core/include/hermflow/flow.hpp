#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermflow/flow_coefficients.hpp"

// The (alpha, beta) reduction of the HCF on g(alpha, beta) metrics.
namespace hermflow::flow {

struct FlowScalars {
    double F = 0;
    double L = 0;
    std::optional<double> static_ratio;  // F/(n-F) when F < n
};

FlowScalars scalars(const FlowCoefficients& fc, int n);

struct Rates {
    double alpha_dot;
    double beta_dot;
};

class InadmissibleState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

Rates ode_rhs(double alpha, double beta, const FlowCoefficients& fc, int n);
// (1/alpha)(gamma+1)((F-n)gamma + F)
double gamma_rate(double alpha, double gamma, const FlowCoefficients& fc, int n);

enum class Termination { reached_t_end, left_admissible_cone, converged };
const char* to_string(Termination t);

struct FlowTrajectory {
    std::vector<double> t, alpha, beta, gamma;
    Termination termination = Termination::reached_t_end;
    double exit_time = 0;
};

struct IntegrateOptions {
    // Stop once |gamma - static ratio| < tol for `window` consecutive steps.
    bool stop_on_convergence = false;
    double convergence_tol = 1e-6;
    int convergence_window = 100;
    // Keep every k-th sample (the final state is always kept).
    int stride = 1;
};

// RK4 with step dt, shortened to 2% of alpha/|alpha_dot| while alpha shrinks. Collapse
// (alpha below 1e-9 alpha0) is reported as left_admissible_cone.
FlowTrajectory integrate(double alpha0, double beta0, const FlowCoefficients& fc, int n, double t_end,
                         double dt, const IntegrateOptions& opt = {});

struct Preservation {
    bool preserved;
    double margin;  // bound - F
    double bound;   // n gamma_n / (gamma_n + 1)
};

Preservation preserves_nonnegativity(const FlowCoefficients& fc, int n);

// gradient, pluriclosed, ustinovskiy
FlowCoefficients named_flow(const std::string& name);
std::vector<std::string> flow_names();

std::string trajectory_csv(const FlowTrajectory& tr);

}  // namespace hermflow::flow
