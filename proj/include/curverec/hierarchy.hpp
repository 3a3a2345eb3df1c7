#pragma once

#include <cstddef>
#include <vector>

#include "curverec/matrix.hpp"

namespace curverec {

// An aggregated curve: cumulative values a_1..a_n, n > 1. Documentation uses
// the 1-based indices a_i; storage is 0-based, so a_i == values[i-1].
struct Curve {
    std::vector<double> values;

    explicit Curve(std::vector<double> v);
    std::size_t size() const noexcept { return values.size(); }
};

// Marginal values b_1..b_n. origin_k tags which disaggregation produced the
// series: origin_k == 1 is the canonical representation (plain differences),
// origin_k == k starts the disaggregation at a_k.
struct BottomSeries {
    std::vector<double> values;
    std::size_t origin_k;

    BottomSeries(std::vector<double> v, std::size_t origin_k = 1);
    std::size_t size() const noexcept { return values.size(); }
};

// The stacked hierarchy values of length 2n-1. For k == 1 the layout is
// (a_n, ..., a_2, b_1, ..., b_n); element n carries the shared node a_1 == b_1
// exactly once. For general k the aggregates are the reversed curve without
// its k-th element, followed by the k-representation bottom values.
struct HierarchyVector {
    std::vector<double> values;
    std::size_t k;

    HierarchyVector(std::vector<double> v, std::size_t k = 1);

    std::size_t size() const noexcept { return values.size(); }
    std::size_t bottom_dim() const noexcept { return (values.size() + 1) / 2; }

    // Accessors for the canonical (k == 1) layout, 1-based like the docs.
    double aggregate(std::size_t i) const;  // a_i
    double bottom(std::size_t j) const;     // b_j
};

// The matrices tying the representations together:
//   summation        S      (2n-1) x n   y     = S b
//   summation_k      S_[k]  (2n-1) x n   y_[k] = S_[k] b_[k]
//   difference       D_n    n x n        b     = D_n a
//   disaggregation_k A_[k]  n x n        b_[k] = A_[k] a
//   basis_change_k   B_[k]  (2n-1)^2     y     = B_[k] y_[k], orthogonal
// They satisfy S = B_[k] S_[k] A_[k] D_n^{-1} for every k.
struct StructureMatrices {
    Matrix summation;
    Matrix summation_k;
    Matrix difference;
    Matrix disaggregation_k;
    Matrix basis_change_k;
};

// a_i = sum_{j<=i} b_j. Requires origin_k == 1.
Curve aggregate_bottom(const BottomSeries& b);

// b_[k],i = a_i - a_{i-1} for i > k, a_i - a_{i+1} for i < k, a_k at i == k.
BottomSeries disaggregate(const Curve& a, std::size_t k);

// (a_[-k] ; b_[k]) where a_[-k] is the reversed curve without element k.
HierarchyVector build_hierarchy_vector(const Curve& a, std::size_t k);

// Convenience: the canonical hierarchy vector of a bottom series (== S b).
HierarchyVector hierarchy_from_bottom(const BottomSeries& b);

Matrix summation_matrix(std::size_t n, std::size_t k = 1);
Matrix difference_matrix(std::size_t n);
Matrix difference_matrix_inverse(std::size_t n);
Matrix disaggregation_matrix(std::size_t n, std::size_t k);
Matrix basis_change_matrix(std::size_t n, std::size_t k);
StructureMatrices structure_matrices(std::size_t n, std::size_t k);

}  // namespace curverec
