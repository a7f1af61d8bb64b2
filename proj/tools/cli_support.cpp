#include "cli_support.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace hermflow::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_real(const std::string& s, const std::string& whole) {
    if (s.empty() || s == "+") return 1;
    if (s == "-") return -1;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + whole + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError("not a number: '" + whole + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p - start)));
        if (p == std::string::npos) return out;
        start = p + 1;
    }
}

}  // namespace

cplx parse_complex(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw UsageError("empty complex number");
    if (s.back() != 'i') return {parse_real(s, raw), 0};
    const std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that is not an exponent sign
    std::size_t cut = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            cut = k;
            break;
        }
    if (cut == std::string::npos) return {0, parse_real(body, raw)};
    if (body.substr(0, cut).empty()) throw UsageError("not a number: '" + raw + "'");
    return {parse_real(body.substr(0, cut), raw), parse_real(body.substr(cut), raw)};
}

std::vector<cplx> parse_vector(const std::string& raw, int n) {
    const std::string s = trim(raw);
    if (s.size() > 1 && s[0] == 'e' && s.find(',') == std::string::npos) {
        int k = 0;
        try {
            k = std::stoi(s.substr(1));
        } catch (const std::exception&) {
            throw UsageError("bad vector shortcut '" + raw + "'");
        }
        if (k < 1 || k > n) throw UsageError("shortcut " + s + " outside e1..e" + std::to_string(n));
        std::vector<cplx> v(static_cast<std::size_t>(n));
        v[static_cast<std::size_t>(k - 1)] = 1;
        return v;
    }
    std::vector<cplx> v;
    for (const auto& part : split(s, ',')) v.push_back(parse_complex(part));
    if (static_cast<int>(v.size()) != n)
        throw UsageError("vector '" + raw + "' has " + std::to_string(v.size()) + " entries, expected " +
                         std::to_string(n));
    return v;
}

catalog::Params parse_params(const std::vector<std::string>& kv) {
    catalog::Params p;
    for (const auto& item : kv)
        for (const auto& part : split(item, ',')) {
            if (part.empty()) continue;
            const auto eq = part.find('=');
            if (eq == std::string::npos) throw UsageError("parameter '" + part + "' is not name=value");
            p[trim(part.substr(0, eq))] = parse_complex(part.substr(eq + 1));
        }
    return p;
}

MetricCoefficients parse_metric(const std::string& s) {
    MetricCoefficients m;
    if (trim(s).empty()) return m;
    for (const auto& part : split(s, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw UsageError("metric entry '" + part + "' is not name=value");
        const std::string key = trim(part.substr(0, eq));
        const cplx v = parse_complex(part.substr(eq + 1));
        auto real = [&] {
            if (v.imag() != 0) throw UsageError(key + " must be real");
            return v.real();
        };
        if (key == "r2")
            m.r2 = real();
        else if (key == "s2")
            m.s2 = real();
        else if (key == "t2")
            m.t2 = real();
        else if (key == "u")
            m.u = v;
        else if (key == "v")
            m.v = v;
        else if (key == "z")
            m.z = v;
        else
            throw UsageError("unknown metric coefficient '" + key + "' (r2, s2, t2, u, v, z)");
    }
    return m;
}

std::string format_complex(cplx c) {
    char re[40], im[40];
    std::snprintf(re, sizeof re, "%.12g", c.real());
    if (c.imag() == 0) return re;
    std::snprintf(im, sizeof im, "%+.12g", c.imag());
    if (c.real() == 0) return std::string(im[0] == '+' ? im + 1 : im) + "i";
    return std::string(re) + im + "i";
}

std::uint64_t default_seed(std::uint64_t fallback) {
    const char* env = std::getenv("HERMFLOW_SEED");
    if (!env || !*env) return fallback;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (env[used] != '\0') throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("HERMFLOW_SEED is not an integer: '") + env + "'");
    }
}

}  // namespace hermflow::cli
