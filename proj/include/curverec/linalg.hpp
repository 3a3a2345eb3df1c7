#pragma once

#include <optional>
#include <vector>

#include "curverec/matrix.hpp"

namespace curverec {

// Lower-triangular Cholesky factor L with A = L L'.
class Cholesky {
public:
    explicit Cholesky(Matrix lower);

    std::size_t dim() const noexcept { return lower_.rows(); }
    const Matrix& lower() const noexcept { return lower_; }

    // Solve A x = b in place.
    void solve_in_place(std::vector<double>& b) const;

    // Solve A X = B column by column.
    Matrix solve(const Matrix& b) const;

private:
    Matrix lower_;
    Matrix lower_t_;  // kept transposed so the back substitution runs on rows
};

// Returns the factor, or nullopt when A is not positive definite.
std::optional<Cholesky> cholesky(const Matrix& a);

// (a + a') / 2 after checking the asymmetry is at most `tol`; otherwise
// throws ValueError mentioning `context`.
Matrix symmetrize_checked(const Matrix& a, double tol, const char* context);

}  // namespace curverec
