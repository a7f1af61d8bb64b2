#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hermflow {

using cplx = std::complex<double>;

// Relative zero threshold: |x| <= kZeroTolerance * (1 + max magnitude).
inline constexpr double kZeroTolerance = 1e-9;

enum class AxisKind { holomorphic, antiholomorphic, frame };

struct FrameIndex {
    enum class Kind { holomorphic, antiholomorphic } kind;
    int position;  // 1-based

    // Offset into a complexified frame {Z_1..Z_n, Zbar_1..Zbar_n}.
    int offset(int n) const;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> dims);
    Tensor(std::vector<int> dims, std::vector<AxisKind> kinds);

    int rank() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    const std::vector<AxisKind>& kinds() const { return kinds_; }
    int dim(int axis) const { return dims_.at(static_cast<std::size_t>(axis)); }
    std::size_t size() const { return data_.size(); }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    std::vector<cplx>& values() { return data_; }
    const std::vector<cplx>& values() const { return data_; }

    template <class... I>
    cplx& operator()(I... idx) { return data_[offset(static_cast<int>(idx)...)]; }
    template <class... I>
    const cplx& operator()(I... idx) const { return data_[offset(static_cast<int>(idx)...)]; }

    cplx& at(const std::vector<int>& idx) { return data_[flat(idx)]; }
    const cplx& at(const std::vector<int>& idx) const { return data_[flat(idx)]; }

    std::size_t flat(const std::vector<int>& idx) const;
    std::vector<int> unflat(std::size_t k) const;

    double max_abs() const;
    bool all_finite() const;

    Tensor& operator+=(const Tensor& o);
    Tensor& operator-=(const Tensor& o);
    Tensor& operator*=(cplx s);

    Tensor conj() const;
    // result(axes permuted) : result.at(i_perm[0], ...) = this->at(i_0, ...)
    Tensor permuted(const std::vector<int>& perm) const;

private:
    template <class... I>
    std::size_t offset(I... idx) const {
        static_assert(sizeof...(I) > 0);
        if (sizeof...(I) != dims_.size())
            throw DimensionError("tensor rank mismatch in element access");
        std::size_t k = 0, a = 0;
        ((k = k * static_cast<std::size_t>(dims_[a++]) + static_cast<std::size_t>(idx)), ...);
        return k;
    }

    std::vector<int> dims_;
    std::vector<AxisKind> kinds_;
    std::vector<cplx> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(cplx s, Tensor a);

Tensor identity(int n);
Tensor basis_vector(int n, int i);

struct AxisPair {
    int first;   // axis of t1
    int second;  // axis of t2
};

// Einstein contraction over the listed axis pairs. With a metric inverse
// (rank 2, G[a][b]) each pair is summed as t1[..a..] G[a][b] t2[..b..].
// Remaining axes: those of t1 in order, then those of t2.
Tensor contract(const Tensor& t1, const Tensor& t2, const std::vector<AxisPair>& pairs,
                const Tensor* metric_inverse = nullptr);

using IndexSelector = std::function<bool(const std::vector<int>&)>;

double max_abs_component(const Tensor& t, const IndexSelector& select);
// Same, also reporting the index tuple of the maximum (empty if none selected).
std::pair<double, std::vector<int>> argmax_abs_component(const Tensor& t, const IndexSelector& select);

}  // namespace hermflow
