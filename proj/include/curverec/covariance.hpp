#pragma once

#include <cstddef>
#include <optional>

#include "curverec/matrix.hpp"
#include "curverec/method.hpp"

namespace curverec {

// T x (2n-1) panel of base-forecast errors, columns ordered like y.
struct ResidualPanel {
    Matrix errors;

    explicit ResidualPanel(Matrix e);
    std::size_t samples() const noexcept { return errors.rows(); }
    std::size_t dim() const noexcept { return errors.cols(); }
};

// A covariance estimate for the base-forecast errors, tagged with the scheme
// that produced it. `shrinkage` carries lambda (Schafer-Strimmer) or delta
// (Ledoit-Wolf); `rho` the graphical-lasso penalty.
struct CovEstimate {
    Matrix w;
    Method scheme;
    std::optional<double> shrinkage;
    std::optional<double> rho;
};

CovEstimate w_identity(std::size_t n);

// Diag(S 1_n) = diag(n, n-1, ..., 2, 1, ..., 1).
CovEstimate w_lambda(const Matrix& summation);

// (1/T) E'E. Residuals enter as-is; `center` subtracts column means first.
CovEstimate w_sample(const ResidualPanel& e, bool center = false);

// Diagonal of the sample covariance.
CovEstimate w_diagonal(const ResidualPanel& e, bool center = false);

// lambda * diag(W_cov) + (1 - lambda) * W_cov with the Schafer-Strimmer
// intensity lambda = sum_{i!=j} Var(r_ij) / sum_{i!=j} r_ij^2, clipped to
// [0, 1].
CovEstimate w_shrink_schafer(const ResidualPanel& e, bool center = false);

// delta * F + (1 - delta) * W_cov, F the constant-correlation target and
// delta the Ledoit-Wolf intensity estimate, clipped to [0, 1].
CovEstimate w_ledoit_wolf(const ResidualPanel& e, bool center = false);

// Graphical lasso on a given sample covariance: block coordinate descent over
// columns, started from W_cov + rho I.
CovEstimate w_glasso(const Matrix& w_sample, double rho);

// Dispatch by scheme. `panel` may be null for the data-free schemes
// (op_ols, op_lambda).
CovEstimate estimate_covariance(Method scheme, const ResidualPanel* panel, std::size_t n,
                                const Matrix& summation, double rho = 0.1, bool center = false);

}  // namespace curverec
