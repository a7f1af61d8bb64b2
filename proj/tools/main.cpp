#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cli_support.hpp"
#include "hermflow/catalog.hpp"
#include "hermflow/flow.hpp"
#include "hermflow/hopf.hpp"
#include "hermflow/oracle.hpp"
#include "hermflow/positivity.hpp"

using namespace hermflow;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json cplx_json(cplx c) { return json::array({c.real(), c.imag()}); }

json metric_json(const MetricCoefficients& m) {
    return {{"r2", m.r2}, {"s2", m.s2}, {"t2", m.t2}, {"u", cplx_json(m.u)}, {"v", cplx_json(m.v)}, {"z", cplx_json(m.z)}};
}

json params_json(const catalog::Params& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = cplx_json(v);
    return j;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw cli::UsageError("cannot write '" + path + "'");
    f << text;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw cli::UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---- hopf ---------------------------------------------------------------

struct HopfArgs {
    int n = 2;
    double alpha = 1, beta = 0;
    std::string point, xi, nu, format = "text";
    bool verify = false;
    double tol = 1e-6;
};

int run_hopf(const HopfArgs& a) {
    const hopf::HopfMetric h{a.n, a.alpha, a.beta};
    hopf::validate(h);
    if (a.point.empty()) throw cli::UsageError("--point is required");
    const hopf::Point z = cli::parse_vector(a.point, a.n);
    if (hopf::norm2(z) == 0) throw cli::UsageError("--point must be nonzero");
    if (a.xi.empty() != a.nu.empty()) throw cli::UsageError("--xi and --nu go together");

    const Tensor M = hopf::bismut_mixed(h, z);
    const double scale = M.max_abs();
    std::optional<double> bis;
    if (!a.xi.empty()) bis = hopf::bisectional(h, z, cli::parse_vector(a.xi, a.n), cli::parse_vector(a.nu, a.n)).value;

    std::optional<double> oracle_defect, pure_defect;
    if (a.verify) {
        oracle::PointMetricField field{a.n, [h](const oracle::Point& p) { return hopf::metric(h, p); }, std::nullopt};
        const Tensor omega = oracle::fd_curvature(field, z);
        oracle_defect = (oracle::mixed_block(omega, a.n) - M).max_abs();
        pure_defect = oracle::max_pure_type(omega, a.n);
    }
    const bool agree = !a.verify || std::max(*oracle_defect, *pure_defect) <= a.tol * std::max(1.0, scale);

    if (a.format == "json") {
        json j;
        j["n"] = a.n;
        j["alpha"] = a.alpha;
        j["beta"] = a.beta;
        j["point"] = json::array();
        for (const auto& c : z) j["point"].push_back(cplx_json(c));
        j["components"] = json::array();
        for (int i = 0; i < a.n; ++i)
            for (int jj = 0; jj < a.n; ++jj)
                for (int k = 0; k < a.n; ++k)
                    for (int l = 0; l < a.n; ++l)
                        if (std::abs(M(i, jj, k, l)) > 1e-14)
                            j["components"].push_back({{"index", {i + 1, jj + 1, k + 1, l + 1}},
                                                       {"value", cplx_json(M(i, jj, k, l))}});
        j["max_abs"] = scale;
        if (bis) j["bisectional"] = *bis;
        if (a.verify) {
            j["verify"] = {{"oracle_defect", *oracle_defect}, {"pure_type", *pure_defect}, {"tolerance", a.tol},
                           {"agree", agree}};
        }
        std::cout << j.dump(2) << "\n";
    } else {
        int shown = 0;
        for (int i = 0; i < a.n; ++i)
            for (int jj = 0; jj < a.n; ++jj)
                for (int k = 0; k < a.n; ++k)
                    for (int l = 0; l < a.n; ++l)
                        if (std::abs(M(i, jj, k, l)) > 1e-14) {
                            std::cout << "Omega[" << i + 1 << "," << jj + 1 << "bar," << k + 1 << "," << l + 1
                                      << "bar] = " << cli::format_complex(M(i, jj, k, l)) << "\n";
                            ++shown;
                        }
        if (shown == 0) std::cout << "all components vanish\n";
        std::cout << "max |Omega| = " << num(scale) << "\n";
        if (bis) std::cout << "bisectional = " << num(*bis) << "\n";
        if (a.verify)
            std::cout << "oracle: mixed defect " << num(*oracle_defect) << ", pure-type " << num(*pure_defect) << " -> "
                      << (agree ? "agree" : "MISMATCH") << "\n";
    }
    return agree ? cli::kOk : cli::kMismatch;
}

// ---- flow ---------------------------------------------------------------

struct FlowArgs {
    std::string name;
    double a = 0, b = 0, c = 0, d = 0;
    int n = 3;
    double alpha0 = 1, beta0 = 0, t_end = 10, dt = 1e-3;
    int stride = 10;
    std::string output, format = "csv";
};

int run_flow(const FlowArgs& a, bool explicit_coeffs) {
    if (!a.name.empty() && explicit_coeffs) throw cli::UsageError("give either --name or --a/--b/--c/--d");
    const FlowCoefficients fc = a.name.empty() ? FlowCoefficients{a.a, a.b, a.c, a.d, "custom"} : flow::named_flow(a.name);
    if (a.stride < 1) throw cli::UsageError("--stride must be positive");
    const auto s = flow::scalars(fc, a.n);
    const auto pres = flow::preserves_nonnegativity(fc, a.n);
    flow::IntegrateOptions opt;
    opt.stride = a.stride;
    const auto tr = flow::integrate(a.alpha0, a.beta0, fc, a.n, a.t_end, a.dt, opt);

    std::ostringstream summary;
    summary << "flow=" << fc.name << " n=" << a.n << " F=" << num(s.F) << " L=" << num(s.L)
            << " static_ratio=" << (s.static_ratio ? num(*s.static_ratio) : "none")
            << " verdict=" << (pres.preserved ? "preserved" : "not-preserved")
            << " termination=" << flow::to_string(tr.termination);
    if (tr.termination == flow::Termination::left_admissible_cone) summary << " exit_time=" << num(tr.exit_time);
    summary << " gamma_end=" << num(tr.gamma.back()) << "\n";

    std::string body;
    if (a.format == "json") {
        json j;
        j["flow"] = {{"name", fc.name}, {"a", fc.a}, {"b", fc.b}, {"c", fc.c}, {"d", fc.d}};
        j["n"] = a.n;
        j["F"] = s.F;
        j["L"] = s.L;
        j["static_ratio"] = s.static_ratio ? json(*s.static_ratio) : json(nullptr);
        j["preserved"] = pres.preserved;
        j["termination"] = flow::to_string(tr.termination);
        j["exit_time"] = tr.exit_time;
        j["dt"] = a.dt;
        j["t"] = tr.t;
        j["alpha"] = tr.alpha;
        j["beta"] = tr.beta;
        j["gamma"] = tr.gamma;
        body = j.dump(2) + "\n";
    } else {
        body = flow::trajectory_csv(tr);
    }
    const bool to_stdout = a.output.empty() || a.output == "-";
    write_output(a.output, body);
    (to_stdout ? std::cerr : std::cout) << summary.str();
    return cli::kOk;
}

// ---- cplx / classify ------------------------------------------------------

struct InvariantArgs {
    std::string family, metric, format = "text";
    std::vector<std::string> params;
    double tol = kZeroTolerance;
    int starts = 64;
};

struct Instance {
    const catalog::FamilySpec* spec;
    catalog::Params params;
    MetricCoefficients m;
    CurvatureTensor omega;
};

Instance build(const InvariantArgs& a) {
    if (!(a.tol > 0)) throw cli::UsageError("--tol must be positive");
    Instance in;
    in.spec = &catalog::family(a.family);
    in.params = cli::parse_params(a.params);
    in.m = cli::parse_metric(a.metric);
    require_admissible(in.m);
    const InvariantGeometry geo(catalog::instantiate(*in.spec, in.params), in.m);
    in.omega = geo.bismut_curvature;
    return in;
}

int run_cplx(const InvariantArgs& a) {
    const Instance in = build(a);
    const CplxReport rep = check_cplx(in.omega, a.tol);
    if (a.format == "json") {
        json j;
        j["family"] = in.spec->id;
        j["params"] = params_json(in.params);
        j["metric"] = metric_json(in.m);
        j["satisfied"] = rep.satisfied;
        j["max_violation"] = rep.max_violation;
        j["absolute_violation"] = rep.absolute_violation;
        j["witness"] = rep.witness ? json(*rep.witness) : json(nullptr);
        j["tolerance"] = rep.tolerance;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << in.spec->id << " [" << catalog::format_params(in.params) << "]: (Cplx) "
                  << (rep.satisfied ? "holds" : "fails") << ", relative violation " << num(rep.max_violation);
        if (rep.witness) {
            const auto& w = *rep.witness;
            std::cout << " at (" << w[0] << "," << w[1] << "," << w[2] << "," << w[3] << ")";
        }
        std::cout << ", tolerance " << num(rep.tolerance) << "\n";
    }
    return cli::kOk;
}

int run_classify(const InvariantArgs& a, std::uint64_t seed) {
    const Instance in = build(a);
    positivity::ClassifyOptions opt;
    opt.seed = seed;
    opt.starts = a.starts;
    opt.metric = hermitian_matrix(in.m);
    const CplxReport rep = check_cplx(in.omega, a.tol);
    if (!rep.satisfied)
        throw cli::UsageError("curvature fails (Cplx) (relative violation " + num(rep.max_violation) +
                              "); the sign is undefined");
    const auto c = positivity::classify(in.omega.mixed_block(), opt);
    auto witness = [](const std::optional<positivity::Witness>& w) -> json {
        if (!w) return nullptr;
        json xi = json::array(), nu = json::array();
        for (const auto& x : w->xi) xi.push_back(cplx_json(x));
        for (const auto& x : w->nu) nu.push_back(cplx_json(x));
        return {{"xi", xi}, {"nu", nu}, {"value", w->value}};
    };
    if (a.format == "json") {
        json j;
        j["family"] = in.spec->id;
        j["params"] = params_json(in.params);
        j["metric"] = metric_json(in.m);
        j["verdict"] = positivity::to_string(c.verdict);
        j["min"] = c.min_value;
        j["max"] = c.max_value;
        j["min_witness"] = witness(c.min_witness);
        j["max_witness"] = witness(c.max_witness);
        j["tolerance"] = c.tol;
        j["cplx_tolerance"] = a.tol;
        j["seed"] = seed;
        j["starts"] = c.starts;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << in.spec->id << " [" << catalog::format_params(in.params) << "]: " << positivity::to_string(c.verdict)
                  << " (min " << num(c.min_value) << ", max " << num(c.max_value) << ", tolerance " << num(c.tol)
                  << ", seed " << seed << ")\n";
    }
    return cli::kOk;
}

// ---- table3 / families ----------------------------------------------------

struct Table3Args {
    int samples = 200;
    int sign_samples = 12;
    std::string expected, format = "markdown", output;
};

int run_table3(const Table3Args& a, std::uint64_t seed) {
    if (a.samples < catalog::kMinSamples) {
        std::cerr << "warning: --samples " << a.samples << " is below the minimum of " << catalog::kMinSamples << "\n";
        return cli::kInvalid;
    }
    if (a.sign_samples < 1) throw cli::UsageError("--sign-samples must be positive");
    std::vector<catalog::ExpectedRow> expected;
    if (!a.expected.empty()) {
        try {
            expected = catalog::load_expected(read_file(a.expected));
        } catch (const json::exception& e) {
            throw cli::UsageError("bad fixture '" + a.expected + "': " + e.what());
        }
    }
    catalog::Table3Options opt;
    opt.samples = a.samples;
    opt.seed = seed;
    opt.sign_samples = a.sign_samples;
    const auto res = catalog::regenerate_table3(opt, expected);
    write_output(a.output, a.format == "json" ? catalog::render_json(res) + "\n" : catalog::render_markdown(res));
    const std::string d = catalog::diff(res);
    if (d.empty()) return cli::kOk;
    std::cerr << "mismatches against the fixture:\n" << d;
    return cli::kMismatch;
}

int run_families(const std::string& format) {
    if (format == "json") {
        json out = json::array();
        for (const auto& f : catalog::families()) {
            json params = json::array();
            for (const auto& p : f.params) params.push_back({{"name", p.name}, {"domain", catalog::to_string(p.domain)}});
            out.push_back({{"id", f.id},
                           {"group", f.group},
                           {"equations", f.equations},
                           {"parameters", params},
                           {"lie_algebras", f.lie_algebras}});
        }
        std::cout << out.dump(2) << "\n";
        return cli::kOk;
    }
    for (const auto& f : catalog::families()) {
        std::cout << f.id << " (" << f.group << "): " << f.equations << "\n";
        for (const auto& p : f.params) std::cout << "    " << p.name << ": " << catalog::to_string(p.domain) << "\n";
        if (!f.not_all_zero.empty()) {
            std::cout << "    not all zero:";
            for (const auto& n : f.not_all_zero) std::cout << " " << n;
            std::cout << "\n";
        }
    }
    return cli::kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bismut curvature, (Cplx) checks and Hermitian curvature flow on Hopf manifolds and "
                 "six-dimensional nil/solvmanifolds"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = kDefaultSeed;
    try {
        seed = cli::default_seed(kDefaultSeed);
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInvalid;
    }
    app.add_option("--seed", seed, "random seed (default: HERMFLOW_SEED or 20240611)");

    HopfArgs hopf_args;
    auto* hopf_cmd = app.add_subcommand("hopf", "Bismut curvature of g(alpha, beta) on a linear Hopf manifold");
    hopf_cmd->add_option("--n", hopf_args.n, "complex dimension")->check(CLI::Range(2, 64));
    hopf_cmd->add_option("--alpha", hopf_args.alpha, "alpha > 0");
    hopf_cmd->add_option("--beta", hopf_args.beta, "beta > -alpha");
    hopf_cmd->add_option("--point", hopf_args.point, "point of C^n minus 0, comma separated or eK")->required();
    hopf_cmd->add_option("--xi", hopf_args.xi, "first (1,0)-vector for the bisectional value");
    hopf_cmd->add_option("--nu", hopf_args.nu, "second (1,0)-vector for the bisectional value");
    hopf_cmd->add_flag("--verify", hopf_args.verify, "cross-check against finite differences of the metric");
    hopf_cmd->add_option("--tol", hopf_args.tol, "relative tolerance for --verify")->check(CLI::PositiveNumber);
    hopf_cmd->add_option("--format", hopf_args.format)->check(CLI::IsMember({"text", "json"}));

    FlowArgs flow_args;
    auto* flow_cmd = app.add_subcommand("flow", "integrate the (alpha, beta) reduction of the HCF");
    flow_cmd->add_option("--name", flow_args.name, "gradient | pluriclosed | ustinovskiy");
    auto* oa = flow_cmd->add_option("--a", flow_args.a);
    auto* ob = flow_cmd->add_option("--b", flow_args.b);
    auto* oc = flow_cmd->add_option("--c", flow_args.c);
    auto* od = flow_cmd->add_option("--d", flow_args.d);
    flow_cmd->add_option("--n", flow_args.n)->check(CLI::Range(2, 1000));
    flow_cmd->add_option("--alpha0", flow_args.alpha0);
    flow_cmd->add_option("--beta0", flow_args.beta0);
    flow_cmd->add_option("--t-end", flow_args.t_end)->check(CLI::PositiveNumber);
    flow_cmd->add_option("--dt", flow_args.dt)->check(CLI::PositiveNumber);
    flow_cmd->add_option("--stride", flow_args.stride, "keep every k-th step");
    flow_cmd->add_option("--output,-o", flow_args.output, "trajectory file (default stdout)");
    flow_cmd->add_option("--format", flow_args.format)->check(CLI::IsMember({"csv", "json"}));

    InvariantArgs inv_args;
    auto add_invariant = [&](CLI::App* cmd) {
        cmd->add_option("--family", inv_args.family, "family id, see `families`")->required();
        cmd->add_option("--param,-p", inv_args.params, "name=value, repeatable or comma separated");
        cmd->add_option("--metric,-m", inv_args.metric, "r2=..,s2=..,t2=..,u=..,v=..,z=..");
        cmd->add_option("--tol", inv_args.tol, "(Cplx) tolerance");
        cmd->add_option("--format", inv_args.format)->check(CLI::IsMember({"text", "json"}));
    };
    auto* cplx_cmd = app.add_subcommand("cplx", "check the (Cplx) symmetry of the Bismut curvature");
    add_invariant(cplx_cmd);
    auto* classify_cmd = app.add_subcommand("classify", "Bismut-Griffiths sign of an invariant metric");
    add_invariant(classify_cmd);
    classify_cmd->add_option("--starts", inv_args.starts, "multistart count")->check(CLI::PositiveNumber);

    Table3Args t3;
    auto* t3_cmd = app.add_subcommand("table3", "regenerate the classification table and diff it against the fixture");
    t3_cmd->add_option("--samples", t3.samples, "random metrics per family case");
    t3_cmd->add_option("--sign-samples", t3.sign_samples, "metrics classified per case");
    t3_cmd->add_option("--expected", t3.expected, "fixture to compare against (default: built in)");
    t3_cmd->add_option("--format", t3.format)->check(CLI::IsMember({"markdown", "json"}));
    t3_cmd->add_option("--output,-o", t3.output);

    std::string fam_format = "text";
    auto* fam_cmd = app.add_subcommand("families", "list the built-in families");
    fam_cmd->add_option("--format", fam_format)->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kInvalid;
    }

    try {
        if (hopf_cmd->parsed()) return run_hopf(hopf_args);
        if (flow_cmd->parsed()) return run_flow(flow_args, oa->count() + ob->count() + oc->count() + od->count() > 0);
        if (cplx_cmd->parsed()) return run_cplx(inv_args);
        if (classify_cmd->parsed()) return run_classify(inv_args, seed);
        if (t3_cmd->parsed()) return run_table3(t3, seed);
        if (fam_cmd->parsed()) return run_families(fam_format);
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kMismatch;
    }
    return cli::kInvalid;
}
