#include "hermflow/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hermflow {

int FrameIndex::offset(int n) const {
    if (position < 1 || position > n)
        throw DimensionError("frame index position " + std::to_string(position) +
                             " outside 1.." + std::to_string(n));
    return (kind == Kind::holomorphic ? 0 : n) + position - 1;
}

Tensor::Tensor(std::vector<int> dims) : Tensor(dims, std::vector<AxisKind>(dims.size(), AxisKind::frame)) {}

Tensor::Tensor(std::vector<int> dims, std::vector<AxisKind> kinds)
    : dims_(std::move(dims)), kinds_(std::move(kinds)) {
    if (kinds_.size() != dims_.size()) throw DimensionError("axis kinds do not match rank");
    std::size_t total = 1;
    for (int d : dims_) {
        if (d <= 0) throw DimensionError("tensor axis of non-positive size");
        total *= static_cast<std::size_t>(d);
    }
    data_.assign(total, cplx{});
}

std::size_t Tensor::flat(const std::vector<int>& idx) const {
    if (idx.size() != dims_.size()) throw DimensionError("tensor rank mismatch in element access");
    std::size_t k = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) k = k * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(idx[a]);
    return k;
}

std::vector<int> Tensor::unflat(std::size_t k) const {
    std::vector<int> idx(dims_.size());
    for (std::size_t a = dims_.size(); a-- > 0;) {
        idx[a] = static_cast<int>(k % static_cast<std::size_t>(dims_[a]));
        k /= static_cast<std::size_t>(dims_[a]);
    }
    return idx;
}

double Tensor::max_abs() const {
    double m = 0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

Tensor& Tensor::operator+=(const Tensor& o) {
    if (o.dims_ != dims_) throw DimensionError("tensor sum with mismatched dimensions");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
    if (o.dims_ != dims_) throw DimensionError("tensor difference with mismatched dimensions");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Tensor& Tensor::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

Tensor Tensor::conj() const {
    Tensor out = *this;
    for (auto& v : out.data_) v = std::conj(v);
    return out;
}

Tensor Tensor::permuted(const std::vector<int>& perm) const {
    if (perm.size() != dims_.size()) throw DimensionError("permutation length differs from rank");
    std::vector<int> nd(dims_.size());
    std::vector<AxisKind> nk(dims_.size());
    for (std::size_t a = 0; a < perm.size(); ++a) {
        nd[static_cast<std::size_t>(perm[a])] = dims_[a];
        nk[static_cast<std::size_t>(perm[a])] = kinds_[a];
    }
    Tensor out(nd, nk);
    std::vector<int> j(dims_.size());
    for (std::size_t k = 0; k < data_.size(); ++k) {
        auto i = unflat(k);
        for (std::size_t a = 0; a < i.size(); ++a) j[static_cast<std::size_t>(perm[a])] = i[a];
        out.at(j) = data_[k];
    }
    return out;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(cplx s, Tensor a) { return a *= s; }

Tensor identity(int n) {
    Tensor t({n, n});
    for (int i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
}

Tensor basis_vector(int n, int i) {
    Tensor t({n});
    t(i) = 1.0;
    return t;
}

Tensor contract(const Tensor& t1, const Tensor& t2, const std::vector<AxisPair>& pairs,
                const Tensor* metric_inverse) {
    const int r1 = t1.rank(), r2 = t2.rank();
    std::vector<bool> used1(static_cast<std::size_t>(r1)), used2(static_cast<std::size_t>(r2));
    for (const auto& p : pairs) {
        if (p.first < 0 || p.first >= r1 || p.second < 0 || p.second >= r2)
            throw DimensionError("contraction axis out of range: (" + std::to_string(p.first) + "," +
                                 std::to_string(p.second) + ")");
        if (used1[static_cast<std::size_t>(p.first)] || used2[static_cast<std::size_t>(p.second)])
            throw DimensionError("contraction axis used twice");
        used1[static_cast<std::size_t>(p.first)] = used2[static_cast<std::size_t>(p.second)] = true;
        const int d1 = t1.dim(p.first), d2 = t2.dim(p.second);
        if (metric_inverse) {
            if (metric_inverse->rank() != 2 || metric_inverse->dim(0) != d1 || metric_inverse->dim(1) != d2)
                throw DimensionError("metric inverse does not match contracted axes (" + std::to_string(p.first) +
                                     " of t1, " + std::to_string(p.second) + " of t2)");
        } else if (d1 != d2) {
            throw DimensionError("contracted axes differ in size: axis " + std::to_string(p.first) + " of t1 has " +
                                 std::to_string(d1) + ", axis " + std::to_string(p.second) + " of t2 has " +
                                 std::to_string(d2));
        }
    }

    std::vector<int> free1, free2, rdims;
    std::vector<AxisKind> rkinds;
    for (int a = 0; a < r1; ++a)
        if (!used1[static_cast<std::size_t>(a)]) {
            free1.push_back(a);
            rdims.push_back(t1.dim(a));
            rkinds.push_back(t1.kinds()[static_cast<std::size_t>(a)]);
        }
    for (int a = 0; a < r2; ++a)
        if (!used2[static_cast<std::size_t>(a)]) {
            free2.push_back(a);
            rdims.push_back(t2.dim(a));
            rkinds.push_back(t2.kinds()[static_cast<std::size_t>(a)]);
        }

    // Summation ranges: one per pair (two when routed through a metric).
    std::vector<int> sdims;
    for (const auto& p : pairs) {
        sdims.push_back(t1.dim(p.first));
        if (metric_inverse) sdims.push_back(t2.dim(p.second));
    }

    Tensor out = rdims.empty() ? Tensor({1}) : Tensor(rdims, rkinds);
    std::size_t nsum = 1;
    for (int d : sdims) nsum *= static_cast<std::size_t>(d);

    std::vector<int> i1(static_cast<std::size_t>(r1)), i2(static_cast<std::size_t>(r2)), s(sdims.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto ri = rdims.empty() ? std::vector<int>{} : out.unflat(k);
        std::size_t q = 0;
        for (int a : free1) i1[static_cast<std::size_t>(a)] = ri[q++];
        for (int a : free2) i2[static_cast<std::size_t>(a)] = ri[q++];
        cplx acc{};
        for (std::size_t m = 0; m < nsum; ++m) {
            std::size_t rem = m;
            for (std::size_t a = sdims.size(); a-- > 0;) {
                s[a] = static_cast<int>(rem % static_cast<std::size_t>(sdims[a]));
                rem /= static_cast<std::size_t>(sdims[a]);
            }
            cplx w = 1.0;
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                if (metric_inverse) {
                    i1[static_cast<std::size_t>(pairs[p].first)] = s[2 * p];
                    i2[static_cast<std::size_t>(pairs[p].second)] = s[2 * p + 1];
                    w *= (*metric_inverse)(s[2 * p], s[2 * p + 1]);
                } else {
                    i1[static_cast<std::size_t>(pairs[p].first)] = s[p];
                    i2[static_cast<std::size_t>(pairs[p].second)] = s[p];
                }
            }
            acc += w * t1.at(i1) * t2.at(i2);
        }
        out.values()[k] = acc;
    }
    return out;
}

std::pair<double, std::vector<int>> argmax_abs_component(const Tensor& t, const IndexSelector& select) {
    double best = 0;
    std::vector<int> where;
    for (std::size_t k = 0; k < t.size(); ++k) {
        auto idx = t.unflat(k);
        if (!select(idx)) continue;
        const double v = std::abs(t.values()[k]);
        if (where.empty() || v > best) {
            best = v;
            where = idx;
        }
    }
    return {best, where};
}

double max_abs_component(const Tensor& t, const IndexSelector& select) {
    return argmax_abs_component(t, select).first;
}

}  // namespace hermflow
