#include "curverec/hierarchy.hpp"

#include <string>

#include "curverec/errors.hpp"

namespace curverec {

namespace {

void check_k(std::size_t n, std::size_t k, const char* op) {
    if (k < 1 || k > n)
        throw ValueError(std::string(op) + ": k must lie in [1, " + std::to_string(n) +
                         "], got " + std::to_string(k));
}

void check_n(std::size_t n, const char* op) {
    if (n < 2) throw DimensionError(std::string(op) + ": need at least 2 values");
}

}  // namespace

Curve::Curve(std::vector<double> v) : values(std::move(v)) {
    check_n(values.size(), "Curve");
    if (!all_finite(values)) throw ValueError("Curve: values must be finite");
}

BottomSeries::BottomSeries(std::vector<double> v, std::size_t origin_k)
    : values(std::move(v)), origin_k(origin_k) {
    check_n(values.size(), "BottomSeries");
    check_k(values.size(), origin_k, "BottomSeries");
    if (!all_finite(values)) throw ValueError("BottomSeries: values must be finite");
}

HierarchyVector::HierarchyVector(std::vector<double> v, std::size_t k) : values(std::move(v)), k(k) {
    if (values.size() < 3 || values.size() % 2 == 0)
        throw DimensionError("HierarchyVector: length must be odd and at least 3");
    check_k(bottom_dim(), k, "HierarchyVector");
    if (!all_finite(values)) throw ValueError("HierarchyVector: values must be finite");
}

double HierarchyVector::aggregate(std::size_t i) const {
    const std::size_t n = bottom_dim();
    if (k != 1) throw ValueError("HierarchyVector::aggregate: only defined for k == 1");
    if (i < 1 || i > n) throw ValueError("HierarchyVector::aggregate: index out of range");
    if (i == 1) return values[n - 1];  // shared node a_1 == b_1
    return values[n - i];
}

double HierarchyVector::bottom(std::size_t j) const {
    const std::size_t n = bottom_dim();
    if (k != 1) throw ValueError("HierarchyVector::bottom: only defined for k == 1");
    if (j < 1 || j > n) throw ValueError("HierarchyVector::bottom: index out of range");
    return values[n - 1 + (j - 1)];
}

Curve aggregate_bottom(const BottomSeries& b) {
    check_n(b.size(), "aggregate_bottom");
    if (b.origin_k != 1)
        throw ValueError("aggregate_bottom: bottom series must be canonical (origin_k == 1)");
    std::vector<double> a(b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        acc += b.values[i];
        a[i] = acc;
    }
    return Curve(std::move(a));
}

BottomSeries disaggregate(const Curve& a, std::size_t k) {
    const std::size_t n = a.size();
    check_k(n, k, "disaggregate");
    std::vector<double> b(n);
    const std::vector<double>& v = a.values;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i > k)
            b[i - 1] = v[i - 1] - v[i - 2];
        else if (i < k)
            b[i - 1] = v[i - 1] - v[i];
        else
            b[i - 1] = v[i - 1];
    }
    return BottomSeries(std::move(b), k);
}

HierarchyVector build_hierarchy_vector(const Curve& a, std::size_t k) {
    const std::size_t n = a.size();
    check_k(n, k, "build_hierarchy_vector");
    std::vector<double> y;
    y.reserve(2 * n - 1);
    // a_[-k]: the reversed curve without element k
    for (std::size_t i = n; i >= 1; --i) {
        if (i != k) y.push_back(a.values[i - 1]);
    }
    BottomSeries b = disaggregate(a, k);
    y.insert(y.end(), b.values.begin(), b.values.end());
    return HierarchyVector(std::move(y), k);
}

HierarchyVector hierarchy_from_bottom(const BottomSeries& b) {
    return build_hierarchy_vector(aggregate_bottom(b), 1);
}

Matrix summation_matrix(std::size_t n, std::size_t k) {
    check_n(n, "summation_matrix");
    check_k(n, k, "summation_matrix");
    Matrix s(2 * n - 1, n);
    // Aggregate rows, top block: row r (0-based, r = 0..n-k-1) is
    // a_{n-r} = sum_{j=k..n-r} b_[k],j.
    for (std::size_t r = 0; r < n - k; ++r)
        for (std::size_t j = k; j <= n - r; ++j) s(r, j - 1) = 1.0;
    // Aggregate rows, lower band: row n-k+m (m = 0..k-2) is
    // a_{k-1-m} = sum_{j=k-1-m..k} b_[k],j.
    for (std::size_t m = 0; m + 2 <= k; ++m)
        for (std::size_t j = k - 1 - m; j <= k; ++j) s(n - k + m, j - 1) = 1.0;
    // Bottom block: identity.
    for (std::size_t j = 0; j < n; ++j) s(n - 1 + j, j) = 1.0;
    return s;
}

Matrix difference_matrix(std::size_t n) {
    check_n(n, "difference_matrix");
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        d(i, i) = 1.0;
        if (i > 0) d(i, i - 1) = -1.0;
    }
    return d;
}

Matrix difference_matrix_inverse(std::size_t n) {
    check_n(n, "difference_matrix_inverse");
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) d(i, j) = 1.0;
    return d;
}

Matrix disaggregation_matrix(std::size_t n, std::size_t k) {
    check_n(n, "disaggregation_matrix");
    check_k(n, k, "disaggregation_matrix");
    Matrix a(n, n);
    for (std::size_t i = 1; i <= n; ++i) {
        a(i - 1, i - 1) = 1.0;
        if (i > k)
            a(i - 1, i - 2) = -1.0;
        else if (i < k)
            a(i - 1, i) = -1.0;
    }
    return a;
}

Matrix basis_change_matrix(std::size_t n, std::size_t k) {
    check_n(n, "basis_change_matrix");
    check_k(n, k, "basis_change_matrix");
    const std::size_t dim = 2 * n - 1;
    Matrix b(dim, dim);
    // Rows 1..n-1 (1-based) hold the canonical aggregates a_n..a_2; rows
    // n..2n-1 hold the canonical bottoms b_1..b_n. Columns follow y_[k]:
    // a_n..a_{k+1}, a_{k-1}..a_1, then b_[k],1..b_[k],n. Each canonical entry
    // is one signed entry of y_[k].
    for (std::size_t p = 1; p <= n - 1; ++p) {
        const std::size_t i = n - p + 1;  // row p carries a_i
        if (i > k)
            b(p - 1, p - 1) = 1.0;  // a_i sits at the same position
        else if (i < k)
            b(p - 1, n - i - 1) = 1.0;  // a_i within the trailing aggregates
        else
            b(p - 1, n - 1 + k - 1) = 1.0;  // a_k == b_[k],k
    }
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t p = n - 1 + j;  // row p carries b_j
        if (j == 1) {
            if (k == 1)
                b(p - 1, n - 1) = 1.0;  // b_1 == b_[1],1
            else
                b(p - 1, n - 2) = 1.0;  // b_1 == a_1, last aggregate of y_[k]
        } else if (j <= k) {
            b(p - 1, n - 1 + j - 2) = -1.0;  // b_j == -b_[k],j-1
        } else {
            b(p - 1, n - 1 + j - 1) = 1.0;  // b_j == b_[k],j
        }
    }
    return b;
}

StructureMatrices structure_matrices(std::size_t n, std::size_t k) {
    check_n(n, "structure_matrices");
    check_k(n, k, "structure_matrices");
    return StructureMatrices{
        summation_matrix(n, 1),     summation_matrix(n, k),   difference_matrix(n),
        disaggregation_matrix(n, k), basis_change_matrix(n, k),
    };
}

}  // namespace curverec
