#include "curverec/linalg.hpp"

#include <cmath>
#include <string>

#include "curverec/errors.hpp"
#include "curverec/kernels.hpp"

namespace curverec {

Cholesky::Cholesky(Matrix lower) : lower_(std::move(lower)), lower_t_(transpose(lower_)) {}

void Cholesky::solve_in_place(std::vector<double>& b) const {
    const std::size_t n = dim();
    if (b.size() != n) throw DimensionError("cholesky solve: rhs length disagrees");
    // forward: L z = b
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = lower_.row(i);
        b[i] = (b[i] - kernels::dot(li, b.data(), i)) / li[i];
    }
    // backward: L' x = z, using the transposed copy so row i is contiguous
    for (std::size_t i = n; i-- > 0;) {
        const double* ui = lower_t_.row(i);
        double acc = 0.0;
        // entries above the diagonal of L' live at columns i+1..n-1
        acc = kernels::dot(ui + i + 1, b.data() + i + 1, n - i - 1);
        b[i] = (b[i] - acc) / ui[i];
    }
}

Matrix Cholesky::solve(const Matrix& b) const {
    if (b.rows() != dim()) throw DimensionError("cholesky solve: rhs rows disagree");
    Matrix x = b;
    std::vector<double> col(dim());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < dim(); ++i) col[i] = b(i, j);
        solve_in_place(col);
        for (std::size_t i = 0; i < dim(); ++i) x(i, j) = col[i];
    }
    return x;
}

std::optional<Cholesky> cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double* li = l.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const double s = a(i, j) - kernels::dot(li, l.row(j), j);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
                li[j] = std::sqrt(s);
            } else {
                li[j] = s / l(j, j);
            }
        }
    }
    return Cholesky(std::move(l));
}

Matrix symmetrize_checked(const Matrix& a, double tol, const char* context) {
    const double asym = max_asymmetry(a);
    if (asym > tol)
        throw ValueError(std::string(context) + ": matrix asymmetry " + std::to_string(asym) +
                         " exceeds tolerance");
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

}  // namespace curverec
