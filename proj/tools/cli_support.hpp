#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermflow/catalog.hpp"
#include "hermflow/tensor.hpp"

// Argument parsing shared by the hermflow executable and its tests.
namespace hermflow::cli {

// Anything the user typed that cannot be used; maps to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum Exit { kOk = 0, kMismatch = 1, kInvalid = 2 };

// "1", "-0.5", "2i", "-i", "0.5-0.25i", "1e-3+2e-2i"
cplx parse_complex(const std::string& s);
// Comma-separated complex entries, or the shortcut eK (1-based) for the K-th unit vector of C^n.
std::vector<cplx> parse_vector(const std::string& s, int n);
// name=value pairs, each value a complex number.
catalog::Params parse_params(const std::vector<std::string>& kv);
// r2=..,s2=..,t2=..,u=..,v=..,z=.. (missing entries keep the unit metric).
MetricCoefficients parse_metric(const std::string& s);
std::string format_complex(cplx c);

// HERMFLOW_SEED when set, else the fallback.
std::uint64_t default_seed(std::uint64_t fallback);

}  // namespace hermflow::cli
