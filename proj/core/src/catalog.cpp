#include "hermflow/catalog.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <set>
#include <sstream>

#include "hermflow/fixtures.hpp"

namespace hermflow::catalog {

using nlohmann::json;

namespace {

constexpr double kParamTol = 1e-12;
const cplx I{0, 1};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string format_cplx(cplx c) {
    if (std::abs(c.imag()) < kParamTol) return fmt("%g", c.real());
    if (std::abs(c.real()) < kParamTol) return fmt("%g", c.imag()) + "i";
    return fmt("%g", c.real()) + (c.imag() < 0 ? "" : "+") + fmt("%g", c.imag()) + "i";
}

cplx read_cplx(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0};
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument("expected a number or [re, im], got " + v.dump());
}

Domain parse_domain(const std::string& s) {
    static const std::map<std::string, Domain> table{
        {"binary", Domain::binary},           {"sign", Domain::sign},
        {"nonneg_real", Domain::nonneg_real}, {"positive_real", Domain::positive_real},
        {"complex", Domain::complex},         {"upper_half", Domain::upper_half},
        {"unit_upper", Domain::unit_upper},   {"not_unit", Domain::not_unit}};
    auto it = table.find(s);
    if (it == table.end()) throw std::invalid_argument("unknown parameter domain '" + s + "'");
    return it->second;
}

bool in_domain(Domain d, cplx v) {
    const bool real = std::abs(v.imag()) <= kParamTol;
    switch (d) {
        case Domain::binary: return real && (std::abs(v.real()) <= kParamTol || std::abs(v.real() - 1) <= kParamTol);
        case Domain::sign: return real && std::abs(std::abs(v.real()) - 1) <= kParamTol;
        case Domain::nonneg_real: return real && v.real() >= 0;
        case Domain::positive_real: return real && v.real() > 0;
        case Domain::complex: return std::isfinite(v.real()) && std::isfinite(v.imag());
        case Domain::upper_half: return v.imag() >= 0;
        case Domain::unit_upper:
            return std::abs(std::abs(v) - 1) <= 1e-9 && (v.imag() > kParamTol || (real && v.real() > 0));
        case Domain::not_unit: return std::abs(std::abs(v) - 1) > 1e-9;
    }
    return false;
}

// Bismut curvature for a fixed bracket table.
CurvatureTensor bismut_curvature(const BracketTable& br, const MetricCoefficients& m) {
    const Tensor g = frame_metric(m);
    return curvature(connection(ConnectionKind::Bismut, br, g), br, g);
}

Tensor inverse_block(const MetricCoefficients& m) {
    // ginv(k, l) = g^{k lbar}
    const Tensor h = hermitian_matrix(m);
    Eigen::Matrix3cd H;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H(i, j) = h(i, j);
    const Eigen::Matrix3cd inv = H.inverse();
    Tensor G({3, 3});
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) G(k, l) = inv(l, k);
    return G;
}

const std::vector<MetricSlice>& candidate_slices() {
    static const std::vector<MetricSlice> c{
        MetricSlice::parse({"v"}), MetricSlice::parse({"v", "z"}), MetricSlice::parse({"u", "v", "z"})};
    return c;
}

std::string aggregate(const std::vector<std::string>& xs) {
    if (xs.empty()) return "";
    std::set<std::string> s(xs.begin(), xs.end());
    if (s.size() == 1) return *s.begin();
    std::string out = "mixed(";
    bool first = true;
    for (const auto& x : s) {
        out += (first ? "" : "/") + x;
        first = false;
    }
    return out + ")";
}

}  // namespace

const char* to_string(Domain d) {
    switch (d) {
        case Domain::binary: return "{0, 1}";
        case Domain::sign: return "{-1, +1}";
        case Domain::nonneg_real: return "real >= 0";
        case Domain::positive_real: return "real > 0";
        case Domain::complex: return "complex";
        case Domain::upper_half: return "complex with Im >= 0";
        case Domain::unit_upper: return "cos t + i sin t, t in [0, pi)";
        case Domain::not_unit: return "complex with |A| != 1";
    }
    return "?";
}

const std::string& builtin_families_json() {
    static const std::string s = detail::kFamiliesJson;
    return s;
}

const std::string& builtin_expected_json() {
    static const std::string s = detail::kExpectedJson;
    return s;
}

std::vector<FamilySpec> load_families(const std::string& text) {
    const json doc = json::parse(text);
    std::vector<FamilySpec> out;
    for (const auto& f : doc.at("families")) {
        FamilySpec s;
        s.id = f.at("id").get<std::string>();
        s.group = f.value("group", "");
        s.equations = f.value("equations", "");
        for (const auto& p : f.value("parameters", json::array()))
            s.params.push_back({p.at("name").get<std::string>(), parse_domain(p.at("domain").get<std::string>())});
        for (const auto& c : f.value("constraints", json::array())) {
            if (c.at("kind") != "not_all_zero") throw std::invalid_argument("unknown constraint in " + s.id);
            s.not_all_zero = c.at("parameters").get<std::vector<std::string>>();
        }
        s.lie_algebras = f.value("lie_algebras", std::vector<std::string>{});
        for (const auto& t : f.at("terms")) {
            Term term;
            const auto form = t.at("form").get<std::string>();
            if (form != "C" && form != "D") throw std::invalid_argument("term form must be C or D in " + s.id);
            term.form = form[0];
            term.k = t.at("k").get<int>();
            term.i = t.at("i").get<int>();
            term.j = t.at("j").get<int>();
            for (const auto& m : t.at("coef")) {
                Monomial mono;
                mono.coef = {m.at(0).get<double>(), m.at(1).get<double>()};
                if (!m.at(2).is_null()) mono.param = m.at(2).get<std::string>();
                mono.power = m.at(3).get<int>();
                term.coef.push_back(mono);
            }
            s.terms.push_back(term);
        }
        out.push_back(std::move(s));
    }
    return out;
}

const std::vector<FamilySpec>& families() {
    static const std::vector<FamilySpec> f = load_families(builtin_families_json());
    return f;
}

const FamilySpec& family(const std::string& id) {
    for (const auto& f : families())
        if (f.id == id) return f;
    std::string known;
    for (const auto& f : families()) known += (known.empty() ? "" : ", ") + f.id;
    throw std::invalid_argument("unknown family '" + id + "' (known: " + known + ")");
}

void check_params(const FamilySpec& spec, const Params& p) {
    for (const auto& [name, v] : p) {
        const bool known = std::any_of(spec.params.begin(), spec.params.end(),
                                       [&](const ParamSpec& s) { return s.name == name; });
        if (!known) throw InadmissibleParams(spec.id + " has no parameter '" + name + "'");
    }
    for (const auto& s : spec.params) {
        auto it = p.find(s.name);
        if (it == p.end()) throw InadmissibleParams(spec.id + " needs parameter '" + s.name + "'");
        if (!in_domain(s.domain, it->second))
            throw InadmissibleParams(spec.id + ": " + s.name + " = " + format_cplx(it->second) + " outside " +
                                     to_string(s.domain));
    }
    if (!spec.not_all_zero.empty()) {
        bool any = false;
        for (const auto& n : spec.not_all_zero) any = any || std::abs(p.at(n)) > kParamTol;
        if (!any) {
            std::string tuple;
            for (const auto& n : spec.not_all_zero) tuple += (tuple.empty() ? "" : ",") + n;
            throw InadmissibleParams(spec.id + ": (" + tuple + ") must not all vanish");
        }
    }
}

StructureEquations instantiate(const FamilySpec& spec, const Params& p) {
    check_params(spec, p);
    StructureEquations eqs(3);
    for (const auto& t : spec.terms) {
        cplx v{};
        for (const auto& m : t.coef) {
            cplx x = m.coef;
            if (m.param) {
                const cplx q = p.at(*m.param);
                if (m.power < 0 && std::abs(q) < kParamTol)
                    throw InadmissibleParams(spec.id + ": " + *m.param + " must be nonzero");
                x *= std::pow(q, m.power);
            }
            v += x;
        }
        if (v == cplx{}) continue;
        if (t.form == 'C')
            eqs.add_c(t.k, t.i, t.j, v);
        else
            eqs.add_d(t.k, t.i, t.j, v);
    }
    const Defect d2 = d_squared_defect(eqs);
    if (d2.value > 1e-10) throw IntegrabilityError(spec.id + ": d^2 != 0 (defect " + fmt("%.3g", d2.value) + ")");
    dualize(eqs);  // throws on Jacobi failure
    return eqs;
}

std::string format_params(const Params& p) {
    if (p.empty()) return "-";
    std::string out;
    for (const auto& [k, v] : p) out += (out.empty() ? "" : ", ") + k + "=" + format_cplx(v);
    return out;
}

MetricSlice MetricSlice::parse(const std::vector<std::string>& tokens) {
    MetricSlice s;
    for (const auto& t : tokens) {
        if (t == "u")
            s.zero_u = true;
        else if (t == "v")
            s.zero_v = true;
        else if (t == "z")
            s.zero_z = true;
        else if (t == "r2=1")
            s.unit_r = true;
        else if (t == "u!=0")
            s.nonzero_u = true;
        else
            throw std::invalid_argument("unknown slice token '" + t + "'");
    }
    if (s.zero_u && s.nonzero_u) throw std::invalid_argument("slice asks for u = 0 and u != 0");
    return s;
}

std::vector<std::string> MetricSlice::tokens() const {
    std::vector<std::string> t;
    if (nonzero_u) t.push_back("u!=0");
    if (zero_u) t.push_back("u");
    if (zero_v) t.push_back("v");
    if (zero_z) t.push_back("z");
    if (unit_r) t.push_back("r2=1");
    return t;
}

std::string MetricSlice::describe() const {
    std::string zeros;
    if (zero_u) zeros += "u";
    if (zero_v) zeros += zeros.empty() ? "v" : "=v";
    if (zero_z) zeros += zeros.empty() ? "z" : "=z";
    std::string out = zeros.empty() ? "" : zeros + "=0";
    if (nonzero_u) out += std::string(out.empty() ? "" : ", ") + "u!=0";
    if (unit_r) out += std::string(out.empty() ? "" : ", ") + "r2=1";
    return out.empty() ? "generic" : out;
}

bool MetricSlice::contains(const MetricCoefficients& m, double tol) const {
    if (zero_u && std::abs(m.u) > tol) return false;
    if (zero_v && std::abs(m.v) > tol) return false;
    if (zero_z && std::abs(m.z) > tol) return false;
    if (unit_r && std::abs(m.r2 - 1) > tol) return false;
    if (nonzero_u && std::abs(m.u) <= tol) return false;
    return true;
}

MetricCoefficients sample_metric(std::mt19937_64& rng, const MetricSlice& slice) {
    std::uniform_real_distribution<double> diag(0.5, 2.0), mod(0.0, 0.4), modu(0.1, 0.4), phase(0.0, 2 * M_PI);
    for (;;) {
        MetricCoefficients m;
        m.r2 = diag(rng);
        m.s2 = diag(rng);
        m.t2 = diag(rng);
        m.u = std::polar(slice.nonzero_u ? modu(rng) : mod(rng), phase(rng));
        m.v = std::polar(mod(rng), phase(rng));
        m.z = std::polar(mod(rng), phase(rng));
        if (slice.zero_u) m.u = 0;
        if (slice.zero_v) m.v = 0;
        if (slice.zero_z) m.z = 0;
        if (slice.unit_r) m.r2 = 1;
        if (!admissibility_failure(m)) return m;
    }
}

std::vector<ExpectedRow> load_expected(const std::string& text) {
    const json doc = json::parse(text);
    std::vector<ExpectedRow> out;
    for (const auto& r : doc.at("rows")) {
        ExpectedRow e;
        e.id = r.at("id").get<std::string>();
        e.family = r.at("family").get<std::string>();
        e.label = r.value("label", "");
        for (const auto& pt : r.at("points")) {
            Params p;
            for (auto it = pt.begin(); it != pt.end(); ++it) p[it.key()] = read_cplx(it.value());
            e.points.push_back(p);
        }
        e.cplx = r.at("cplx").get<std::string>();
        if (e.cplx != "always" && e.cplx != "slice" && e.cplx != "never")
            throw std::invalid_argument("row " + e.id + ": cplx must be always, slice or never");
        e.cplx_slice = MetricSlice::parse(r.value("cplx_slice", std::vector<std::string>{}));
        e.sign_slice = MetricSlice::parse(r.value("sign_slice", std::vector<std::string>{}));
        if (!r.at("sign").is_null()) e.sign = r.at("sign").get<std::string>();
        out.push_back(std::move(e));
    }
    return out;
}

bool Table3Result::rows_match() const {
    return std::all_of(rows.begin(), rows.end(), [](const ClassificationRow& r) { return r.matches(); });
}

bool Table3Result::witnesses_pass() const {
    return std::all_of(witnesses.begin(), witnesses.end(), [](const NumericWitness& w) { return w.passed; });
}

namespace {

PointResult classify_point(const FamilySpec& spec, const Params& params, const ExpectedRow& row,
                           const Table3Options& opt, std::mt19937_64& rng) {
    PointResult pr;
    pr.params = params;
    const StructureEquations eqs = instantiate(spec, params);
    const BracketTable br = dualize(eqs);

    // Worst violation over `samples` metrics on a slice (generic when empty).
    struct Scan {
        double worst = 0;
        std::optional<std::array<int, 4>> witness;
    };
    auto scan = [&](const MetricSlice& s) {
        Scan out;
        for (int k = 0; k < opt.samples; ++k) {
            const CplxReport rep = check_cplx(bismut_curvature(br, sample_metric(rng, s)));
            if (rep.max_violation >= out.worst) {
                out.worst = rep.max_violation;
                if (rep.witness) out.witness = rep.witness;
            }
        }
        return out;
    };

    const Scan generic = scan({});
    pr.generic_violation = generic.worst;
    pr.witness = generic.witness;
    if (generic.worst <= kZeroTolerance) {
        pr.cplx = "always";
        pr.slice_violation = generic.worst;
    } else {
        pr.cplx = "never";
        for (const auto& s : candidate_slices()) {
            const Scan sc = scan(s);
            if (sc.worst <= kZeroTolerance) {
                pr.cplx = "slice";
                pr.cplx_slice = s;
                pr.slice_violation = sc.worst;
                break;
            }
        }
    }
    if (pr.cplx == "never") return pr;

    // Classify where the expected row asks, or on the computed slice when it has no opinion.
    MetricSlice where = row.sign ? row.sign_slice : pr.cplx_slice;
    if (pr.cplx == "slice") {
        where.zero_u = where.zero_u || pr.cplx_slice.zero_u;
        where.zero_v = where.zero_v || pr.cplx_slice.zero_v;
        where.zero_z = where.zero_z || pr.cplx_slice.zero_z;
    }
    std::vector<std::string> verdicts;
    pr.min_bisectional = INFINITY;
    pr.max_bisectional = -INFINITY;
    for (int k = 0; k < opt.sign_samples; ++k) {
        const MetricCoefficients m = sample_metric(rng, where);
        const CurvatureTensor om = bismut_curvature(br, m);
        if (!check_cplx(om).satisfied) {
            verdicts.emplace_back("cplx-fails");
            continue;
        }
        auto copt = opt.classify;
        copt.seed = rng();
        copt.metric = hermitian_matrix(m);
        const auto c = positivity::classify(om.mixed_block(), copt);
        verdicts.emplace_back(positivity::to_string(c.verdict));
        pr.min_bisectional = std::min(pr.min_bisectional, c.min_value);
        pr.max_bisectional = std::max(pr.max_bisectional, c.max_value);
    }
    pr.sign = aggregate(verdicts);
    return pr;
}

}  // namespace

Table3Result regenerate_table3(const Table3Options& opt, const std::vector<ExpectedRow>& expected_in) {
    if (opt.samples < kMinSamples)
        throw std::invalid_argument("samples per family must be at least " + std::to_string(kMinSamples));
    const std::vector<ExpectedRow> expected = expected_in.empty() ? load_expected(builtin_expected_json()) : expected_in;

    Table3Result res;
    res.samples = opt.samples;
    res.seed = opt.seed;
    std::uint64_t row_seed = opt.seed;
    for (const auto& e : expected) {
        // Each row gets its own stream so rows are independent of their order.
        std::mt19937_64 rng(row_seed);
        row_seed = row_seed * 6364136223846793005ULL + 1442695040888963407ULL;
        ClassificationRow row;
        row.expected = e;
        const FamilySpec& spec = family(e.family);
        std::vector<std::string> cats, slices, signs;
        for (const auto& p : e.points) {
            row.points.push_back(classify_point(spec, p, e, opt, rng));
            const auto& pr = row.points.back();
            cats.push_back(pr.cplx);
            slices.push_back(pr.cplx_slice.describe());
            if (pr.sign) signs.push_back(*pr.sign);
        }
        row.cplx = aggregate(cats);
        if (std::set<std::string>(slices.begin(), slices.end()).size() == 1) row.cplx_slice = row.points[0].cplx_slice;
        if (signs.size() == row.points.size() && !signs.empty()) row.sign = aggregate(signs);
        row.cplx_match = row.cplx == e.cplx;
        row.slice_match = row.cplx != "slice" || (std::set<std::string>(slices.begin(), slices.end()).size() == 1 &&
                                                  row.cplx_slice == e.cplx_slice);
        row.sign_match = row.sign == e.sign;
        res.rows.push_back(std::move(row));
    }
    res.witnesses = numeric_witnesses(opt.samples, opt.seed);
    return res;
}

std::vector<NumericWitness> numeric_witnesses(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<NumericWitness> out;
    const MetricCoefficients unit{};

    // Iwasawa
    {
        const BracketTable br = dualize(instantiate(family("Np"), {{"rho", 1}}));
        auto det = [&](const MetricCoefficients& m) {
            const CurvatureTensor om = bismut_curvature(br, m);
            return (om.mixed(0, 0, 2, 2) * om.mixed(1, 1, 2, 2) - om.mixed(0, 1, 2, 2) * om.mixed(1, 0, 2, 2)).real();
        };
        auto printed_det = [](const MetricCoefficients& m) { return -std::pow(m.t2, 5) / (4 * eight_det_xi(m)); };
        auto coef = [&](const MetricCoefficients& m) { return bismut_curvature(br, m).mixed(0, 0, 2, 2).real(); };
        auto printed_coef = [](const MetricCoefficients& m) {
            return m.t2 * m.t2 * (m.r2 * m.t2 - std::norm(m.z)) / (2 * eight_det_xi(m));
        };
        NumericWitness a{"Np rho=1: Omega_{1 1bar 3 3bar}", "t^4 (r^2 t^2 - |z|^2) / 16 i det Xi", printed_coef(unit),
                         coef(unit), 0, false, ""};
        NumericWitness b{"Np rho=1: Omega_{11bar33bar} Omega_{22bar33bar} - Omega_{12bar33bar} Omega_{21bar33bar}",
                         "-t^10 / 32 i det Xi", printed_det(unit), det(unit), 0, false, ""};
        double sign_flip = 0;
        for (int k = 0; k < samples; ++k) {
            const auto m = sample_metric(rng);
            a.formula_defect = std::max(a.formula_defect, std::abs(coef(m) - printed_coef(m)));
            b.formula_defect = std::max(b.formula_defect, std::abs(det(m) - printed_det(m)));
            sign_flip = std::max(sign_flip, std::abs(det(m) + printed_det(m)));
        }
        a.passed = a.formula_defect <= 1e-9 && std::abs(a.computed - a.expected) <= 1e-9;
        b.passed = b.formula_defect <= 1e-9 && std::abs(b.computed - b.expected) <= 1e-9;
        if (!b.passed && sign_flip <= 1e-9) b.note = "computed value is exactly the negative of the closed form";
        out.push_back(a);
        out.push_back(b);
    }

    // (Ni) h2 determinant on v = z = 0, r2 = 1
    {
        const BracketTable br = dualize(instantiate(family("Ni"), {{"rho", 0}, {"lambda", 0}, {"D", I}}));
        auto det = [&](const MetricCoefficients& m) {
            const CurvatureTensor om = bismut_curvature(br, m);
            return (om.mixed(2, 2, 0, 0) * om.mixed(2, 2, 1, 1) - om.mixed(2, 2, 0, 1) * om.mixed(2, 2, 1, 0)).real();
        };
        auto printed = [](const MetricCoefficients& m) {
            const double q = m.s2 - std::norm(m.u);
            return -std::pow(m.t2, 4) * std::norm(m.u) / (q * q);
        };
        MetricCoefficients ref;
        ref.u = 0.3;
        NumericWitness w{"Ni h2: Omega_{33bar11bar} Omega_{33bar22bar} - Omega_{33bar12bar} Omega_{33bar21bar}",
                         "-t^8 |u|^2 / (s^2 - |u|^2)^2", printed(ref), det(ref), 0, false, "reference u = 0.3"};
        const MetricSlice s = MetricSlice::parse({"v", "z", "r2=1"});
        for (int k = 0; k < samples; ++k) {
            const auto m = sample_metric(rng, s);
            w.formula_defect = std::max(w.formula_defect, std::abs(det(m) - printed(m)));
        }
        w.passed = w.formula_defect <= 1e-9 && std::abs(w.computed - w.expected) <= 1e-9;
        out.push_back(w);
    }

    // (Ni) D = 1/4: second Ricci determinant
    {
        const BracketTable br = dualize(instantiate(family("Ni"), {{"rho", 0}, {"lambda", 1}, {"D", 0.25}}));
        auto det = [&](const MetricCoefficients& m) {
            const CurvatureTensor om = bismut_curvature(br, m);
            const Tensor G = inverse_block(m);
            cplx ric[2][2]{};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l) ric[i][j] += G(k, l) * om.mixed(k, l, i, j);
            return (ric[0][0] * ric[1][1] - ric[0][1] * ric[1][0]).real();
        };
        auto printed = [](const MetricCoefficients& m) {
            const double q = m.s2 - std::norm(m.u);
            return -std::norm(4 * m.s2 - 4.0 * I * std::conj(m.u) + 1.0) / (16 * q * q);
        };
        NumericWitness w{"Ni h4: det Ric2 (1,2 block)", "-|4s^2 - 4i ubar + 1|^2 / 16 (s^2 - |u|^2)^2 < 0",
                         printed(unit), det(unit), 0, false, ""};
        const MetricSlice s = MetricSlice::parse({"v", "z", "r2=1"});
        double worst = -INFINITY, scaled_defect = 0;
        for (int k = 0; k < samples; ++k) {
            const auto m = sample_metric(rng, s);
            const double d = det(m);
            worst = std::max(worst, d);
            w.formula_defect = std::max(w.formula_defect, std::abs(d - printed(m)));
            scaled_defect = std::max(scaled_defect, std::abs(d - std::pow(m.t2, 2) * printed(m)));
        }
        // The criterion is the sign; the closed form is reported for reference.
        w.passed = worst < 0 && w.computed < 0;
        w.note = "largest sampled value " + fmt("%.3g", worst) + "; defect against t^4 times the closed form " +
                 fmt("%.2g", scaled_defect);
        out.push_back(w);
    }

    // (Siii1) on u = v = z = 0: Omega_{1 1bar 1 1bar} = t^2 is the only mixed component
    {
        NumericWitness w{"Siii1: sole mixed component Omega_{11bar11bar}", "t^2", 1.0, 0, 0, false, ""};
        const MetricSlice s = MetricSlice::parse({"u", "v", "z"});
        for (int sg : {1, -1}) {
            const BracketTable br = dualize(instantiate(family("Siii1"), {{"sign", sg}}));
            for (int k = 0; k <= samples; ++k) {
                const auto m = k == 0 ? unit : sample_metric(rng, s);
                const CurvatureTensor om = bismut_curvature(br, m);
                if (k == 0 && sg == 1) w.computed = om.mixed(0, 0, 0, 0).real();
                double d = std::abs(om.mixed(0, 0, 0, 0) - m.t2);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        for (int a = 0; a < 3; ++a)
                            for (int b = 0; b < 3; ++b)
                                if (i + j + a + b > 0) d = std::max(d, std::abs(om.mixed(i, j, a, b)));
                w.formula_defect = std::max(w.formula_defect, d);
            }
        }
        w.passed = w.formula_defect <= 1e-9;
        out.push_back(w);
    }

    // (Ni) lambda = 0: Omega_{1 1bar 1 1bar} = t^2
    {
        NumericWitness w{"Ni lambda=0: Omega_{11bar11bar}", "t^2", 1.0, 0, 0, false, ""};
        const MetricSlice s = MetricSlice::parse({"v", "z", "r2=1"});
        for (cplx D : {I, cplx(1), cplx(-1), cplx(0)}) {
            const BracketTable br = dualize(instantiate(family("Ni"), {{"rho", 0}, {"lambda", 0}, {"D", D}}));
            if (D == I) w.computed = bismut_curvature(br, unit).mixed(0, 0, 0, 0).real();
            for (int k = 0; k < samples / 4; ++k) {
                const auto m = sample_metric(rng, s);
                w.formula_defect = std::max(w.formula_defect, std::abs(bismut_curvature(br, m).mixed(0, 0, 0, 0) - m.t2));
            }
        }
        w.passed = w.formula_defect <= 1e-9 && std::abs(w.computed - 1) <= 1e-9;
        out.push_back(w);
    }
    return out;
}

std::string render_markdown(const Table3Result& r) {
    std::ostringstream os;
    os << "| Row | Family | Case | (Cplx) | Metric slice | Bismut-Griffiths sign | Match |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const auto& row : r.rows) {
        os << "| " << row.expected.id << " | " << row.expected.family << " | " << row.expected.label << " | "
           << row.cplx << " | " << (row.cplx == "slice" ? row.cplx_slice.describe() : "-") << " | "
           << row.sign.value_or("-") << " | " << (row.matches() ? "yes" : "NO") << " |\n";
    }
    os << "\n| Witness | Closed form | Expected | Computed | Max defect | Pass |\n";
    os << "|---|---|---|---|---|---|\n";
    for (const auto& w : r.witnesses) {
        os << "| " << w.name << " | " << w.formula << " | " << fmt("%.10g", w.expected) << " | "
           << fmt("%.10g", w.computed) << " | " << fmt("%.3g", w.formula_defect) << " | " << (w.passed ? "yes" : "NO")
           << (w.note.empty() ? "" : " (" + w.note + ")") << " |\n";
    }
    os << "\nsamples=" << r.samples << " seed=" << r.seed << " tolerance=" << fmt("%g", r.tolerance) << "\n";
    return os.str();
}

std::string render_json(const Table3Result& r) {
    json doc;
    doc["samples"] = r.samples;
    doc["seed"] = r.seed;
    doc["tolerance"] = r.tolerance;
    doc["rows_match"] = r.rows_match();
    doc["witnesses_pass"] = r.witnesses_pass();
    doc["rows"] = json::array();
    for (const auto& row : r.rows) {
        json j;
        j["id"] = row.expected.id;
        j["family"] = row.expected.family;
        j["label"] = row.expected.label;
        j["cplx"] = row.cplx;
        j["cplx_slice"] = row.cplx == "slice" ? json(row.cplx_slice.tokens()) : json::array();
        j["sign"] = row.sign ? json(*row.sign) : json(nullptr);
        j["expected"] = {{"cplx", row.expected.cplx},
                         {"cplx_slice", row.expected.cplx_slice.tokens()},
                         {"sign", row.expected.sign ? json(*row.expected.sign) : json(nullptr)}};
        j["match"] = row.matches();
        if (!row.flow_note.empty()) j["flow"] = row.flow_note;
        j["points"] = json::array();
        for (const auto& p : row.points) {
            json q;
            q["params"] = format_params(p.params);
            q["cplx"] = p.cplx;
            q["slice_violation"] = p.slice_violation;
            q["generic_violation"] = p.generic_violation;
            if (p.witness) q["witness"] = *p.witness;
            if (p.sign) {
                q["sign"] = *p.sign;
                q["min_bisectional"] = p.min_bisectional;
                q["max_bisectional"] = p.max_bisectional;
            }
            j["points"].push_back(q);
        }
        doc["rows"].push_back(j);
    }
    doc["witnesses"] = json::array();
    for (const auto& w : r.witnesses)
        doc["witnesses"].push_back({{"name", w.name},
                                    {"closed_form", w.formula},
                                    {"expected", w.expected},
                                    {"computed", w.computed},
                                    {"max_defect", w.formula_defect},
                                    {"pass", w.passed},
                                    {"note", w.note}});
    return doc.dump(2);
}

std::string diff(const Table3Result& r) {
    std::ostringstream os;
    for (const auto& row : r.rows) {
        if (row.matches()) continue;
        os << row.expected.id << ":";
        if (!row.cplx_match) os << " cplx expected " << row.expected.cplx << " got " << row.cplx << ";";
        if (!row.slice_match)
            os << " slice expected " << row.expected.cplx_slice.describe() << " got " << row.cplx_slice.describe()
               << ";";
        if (!row.sign_match)
            os << " sign expected " << row.expected.sign.value_or("none") << " got " << row.sign.value_or("none")
               << ";";
        for (const auto& p : row.points)
            if (p.witness && p.cplx != "always")
                os << " [" << format_params(p.params) << ": generic violation " << fmt("%.3g", p.generic_violation)
                   << " at (" << (*p.witness)[0] << "," << (*p.witness)[1] << "," << (*p.witness)[2] << ","
                   << (*p.witness)[3] << ")]";
        os << "\n";
    }
    for (const auto& w : r.witnesses)
        if (!w.passed)
            os << "witness " << w.name << ": expected " << fmt("%.10g", w.expected) << " got "
               << fmt("%.10g", w.computed) << " (max defect " << fmt("%.3g", w.formula_defect) << ")"
               << (w.note.empty() ? "" : "; " + w.note) << "\n";
    return os.str();
}

FlowPreservationReport flow_preservation_check(const FamilySpec& spec, const Params& p, const MetricSlice& slice,
                                               const FlowCoefficients& fc, double t_end, double dt,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const StructureEquations eqs = instantiate(spec, p);
    const BracketTable br = dualize(eqs);
    FlowPreservationReport rep;
    rep.family = spec.id;
    rep.params = p;
    rep.slice = slice;
    rep.fc = fc;
    rep.t_end = t_end;

    const MetricCoefficients m0 = sample_metric(rng, slice);
    auto sign_of = [&](const MetricCoefficients& m) -> std::optional<std::string> {
        const CurvatureTensor om = bismut_curvature(br, m);
        if (!check_cplx(om).satisfied) return std::nullopt;
        positivity::ClassifyOptions o;
        o.seed = seed;
        o.metric = hermitian_matrix(m);
        return std::string(positivity::to_string(positivity::classify(om.mixed_block(), o).verdict));
    };
    rep.sign_start = sign_of(m0);
    rep.sign_end = rep.sign_start;

    const InvariantTrajectory tr = integrate_invariant_flow(eqs, m0, fc, t_end, dt);
    rep.left_cone = tr.left_cone;
    rep.exit_time = tr.exit_time;
    rep.checked_until = tr.left_cone ? 0.9 * tr.exit_time : t_end;
    for (const auto& m : tr.m) {
        if (slice.zero_u) rep.slice_drift = std::max(rep.slice_drift, std::abs(m.u));
        if (slice.zero_v) rep.slice_drift = std::max(rep.slice_drift, std::abs(m.v));
        if (slice.zero_z) rep.slice_drift = std::max(rep.slice_drift, std::abs(m.z));
    }
    // Sign at five checkpoints; the last one is reported.
    bool same = rep.sign_start.has_value();
    const bool flat = rep.sign_start == std::optional<std::string>("flat");
    std::size_t next = 1;
    for (std::size_t i = 1; i < tr.m.size() && tr.t[i] <= rep.checked_until + 1e-12; ++i) {
        const bool last = i + 1 == tr.m.size() || tr.t[i + 1] > rep.checked_until + 1e-12;
        if (tr.t[i] < rep.checked_until * static_cast<double>(next) / 5 - 1e-12 && !last) continue;
        ++next;
        rep.sign_end = sign_of(tr.m[i]);
        same = same && rep.sign_end == rep.sign_start;
        if (flat) rep.flat_defect = std::max(rep.flat_defect, bismut_curvature(br, tr.m[i]).omega.max_abs());
    }
    rep.preserved = same && rep.slice_drift <= 1e-8 && (!flat || rep.flat_defect < 1e-7);
    return rep;
}

}  // namespace hermflow::catalog
