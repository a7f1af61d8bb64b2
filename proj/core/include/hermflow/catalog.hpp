#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermflow/flow_coefficients.hpp"
#include "hermflow/invariant.hpp"
#include "hermflow/positivity.hpp"

// Invariant complex structures on six-dimensional nil/solvmanifolds and the
// harness that classifies their Bismut curvature.
namespace hermflow::catalog {

using Params = std::map<std::string, cplx>;

enum class Domain { binary, sign, nonneg_real, positive_real, complex, upper_half, unit_upper, not_unit };
const char* to_string(Domain d);

struct ParamSpec {
    std::string name;
    Domain domain;
};

struct Monomial {
    cplx coef;
    std::optional<std::string> param;
    int power = 0;
};

struct Term {
    char form;  // 'C' (phi^{ij}) or 'D' (phi^{i jbar})
    int k, i, j;  // 1-based
    std::vector<Monomial> coef;
};

struct FamilySpec {
    std::string id;
    std::string group;  // nil | solv
    std::string equations;
    std::vector<ParamSpec> params;
    std::vector<std::string> not_all_zero;  // empty when unconstrained
    std::vector<std::string> lie_algebras;
    std::vector<Term> terms;
};

class InadmissibleParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Built-in fixtures (copies of data/*.json compiled into the library).
const std::string& builtin_families_json();
const std::string& builtin_expected_json();

std::vector<FamilySpec> load_families(const std::string& json_text);
const std::vector<FamilySpec>& families();
const FamilySpec& family(const std::string& id);

// Throws InadmissibleParams naming the offending parameter.
void check_params(const FamilySpec& spec, const Params& p);
StructureEquations instantiate(const FamilySpec& spec, const Params& p);
std::string format_params(const Params& p);

// Metric slices: coefficients forced to zero, optional r2 = 1, optional |u| >= 0.1.
struct MetricSlice {
    bool zero_u = false, zero_v = false, zero_z = false;
    bool unit_r = false;
    bool nonzero_u = false;

    static MetricSlice parse(const std::vector<std::string>& tokens);
    std::vector<std::string> tokens() const;
    std::string describe() const;  // "u=v=z=0", "generic", ...
    bool contains(const MetricCoefficients& m, double tol = 1e-12) const;
    bool operator==(const MetricSlice& o) const = default;
};

// r2,s2,t2 uniform in [0.5,2]; u,v,z uniform modulus in [0,0.4] with uniform phase; rejection on admissibility.
MetricCoefficients sample_metric(std::mt19937_64& rng, const MetricSlice& slice = {});

// Expected classification row.
struct ExpectedRow {
    std::string id, family, label;
    std::vector<Params> points;
    std::string cplx;  // always | slice | never
    MetricSlice cplx_slice;
    MetricSlice sign_slice;
    std::optional<std::string> sign;
};

std::vector<ExpectedRow> load_expected(const std::string& json_text);

struct PointResult {
    Params params;
    std::string cplx;  // computed category
    MetricSlice cplx_slice;
    double slice_violation = 0;    // worst relative (Cplx) violation on the slice
    double generic_violation = 0;  // best violation seen off the slice (certifies failure)
    std::optional<std::array<int, 4>> witness;
    std::optional<std::string> sign;
    double min_bisectional = 0, max_bisectional = 0;
};

struct ClassificationRow {
    ExpectedRow expected;
    std::vector<PointResult> points;
    std::string cplx;
    MetricSlice cplx_slice;
    std::optional<std::string> sign;
    bool cplx_match = false, slice_match = false, sign_match = false;
    std::string flow_note;

    bool matches() const { return cplx_match && slice_match && sign_match; }
};

struct NumericWitness {
    std::string name;
    std::string formula;
    double expected = 0;  // printed closed form at the reference point
    double computed = 0;
    double formula_defect = 0;  // worst |computed - closed form| over random samples
    bool passed = false;
    std::string note;
};

struct Table3Options {
    int samples = 200;
    std::uint64_t seed = 20240611;
    int sign_samples = 12;
    positivity::ClassifyOptions classify{};
};

struct Table3Result {
    std::vector<ClassificationRow> rows;
    std::vector<NumericWitness> witnesses;
    int samples = 0;
    std::uint64_t seed = 0;
    double tolerance = kZeroTolerance;

    bool rows_match() const;
    bool witnesses_pass() const;
};

inline constexpr int kMinSamples = 50;

// Throws std::invalid_argument when samples < kMinSamples.
Table3Result regenerate_table3(const Table3Options& opt = {}, const std::vector<ExpectedRow>& expected = {});
std::vector<NumericWitness> numeric_witnesses(int samples, std::uint64_t seed);

std::string render_markdown(const Table3Result& r);
std::string render_json(const Table3Result& r);
// One line per mismatching row; empty when everything matches.
std::string diff(const Table3Result& r);

struct FlowPreservationReport {
    std::string family;
    Params params;
    MetricSlice slice;
    FlowCoefficients fc;
    double t_end = 0;
    double slice_drift = 0;  // worst |forced coefficient| along the trajectory
    std::optional<std::string> sign_start, sign_end;
    double flat_defect = 0;  // max |Omega^B| at the end, for flat starts
    bool left_cone = false;
    double exit_time = 0;  // when the trajectory left the admissible cone
    double checked_until = 0;
    bool preserved = false;
};

// Integrates the invariant flow from a random metric on the slice and reports
// whether the slice and the sign class persist. Some coefficient tuples reach a
// finite-time singularity before t_end; the sign is then compared on
// [0, 0.9 exit_time].
FlowPreservationReport flow_preservation_check(const FamilySpec& spec, const Params& p, const MetricSlice& slice,
                                               const FlowCoefficients& fc, double t_end, double dt,
                                               std::uint64_t seed);

}  // namespace hermflow::catalog
