#include "curverec/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "curverec/errors.hpp"
#include "curverec/kernels.hpp"
#include "curverec/linalg.hpp"

namespace curverec {

namespace {

// Columns of the panel transposed into contiguous rows, optionally centered.
Matrix panel_by_level(const ResidualPanel& e, bool center) {
    const std::size_t t_count = e.samples();
    const std::size_t dim = e.dim();
    Matrix by_level(dim, t_count);
    for (std::size_t t = 0; t < t_count; ++t)
        for (std::size_t l = 0; l < dim; ++l) by_level(l, t) = e.errors(t, l);
    if (center) {
        for (std::size_t l = 0; l < dim; ++l) {
            double* row = by_level.row(l);
            const double mean = kernels::sum(row, t_count) / static_cast<double>(t_count);
            for (std::size_t t = 0; t < t_count; ++t) row[t] -= mean;
        }
    }
    return by_level;
}

Matrix gram_over_t(const Matrix& by_level) {
    const std::size_t dim = by_level.rows();
    const std::size_t t_count = by_level.cols();
    Matrix w(dim, dim);
    const double inv_t = 1.0 / static_cast<double>(t_count);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            const double v = kernels::dot(by_level.row(i), by_level.row(j), t_count) * inv_t;
            w(i, j) = v;
            w(j, i) = v;
        }
    return w;
}

void require_samples(const ResidualPanel& e, std::size_t min_t, const char* op) {
    if (e.samples() < min_t)
        throw InsufficientDataError(std::string(op) + ": needs at least " +
                                    std::to_string(min_t) + " samples, got " +
                                    std::to_string(e.samples()));
}

}  // namespace

ResidualPanel::ResidualPanel(Matrix e) : errors(std::move(e)) {
    if (errors.rows() < 1) throw InsufficientDataError("ResidualPanel: empty panel");
    if (errors.cols() < 2) throw DimensionError("ResidualPanel: need at least two columns");
    if (!all_finite(errors)) throw ValueError("ResidualPanel: entries must be finite");
}

CovEstimate w_identity(std::size_t n) {
    if (n < 2) throw DimensionError("w_identity: n must be at least 2");
    return CovEstimate{Matrix::identity(2 * n - 1), Method::op_ols, std::nullopt, std::nullopt};
}

CovEstimate w_lambda(const Matrix& summation) {
    const std::size_t n = summation.cols();
    if (n < 2 || summation.rows() != 2 * n - 1)
        throw DimensionError("w_lambda: summation matrix shape");
    Matrix w(2 * n - 1, 2 * n - 1);
    for (std::size_t r = 0; r < summation.rows(); ++r)
        w(r, r) = kernels::sum(summation.row(r), n);
    return CovEstimate{std::move(w), Method::op_lambda, std::nullopt, std::nullopt};
}

CovEstimate w_sample(const ResidualPanel& e, bool center) {
    require_samples(e, 2, "w_sample");
    Matrix w = gram_over_t(panel_by_level(e, center));
    return CovEstimate{std::move(w), Method::op_cov, std::nullopt, std::nullopt};
}

CovEstimate w_diagonal(const ResidualPanel& e, bool center) {
    CovEstimate full = w_sample(e, center);
    Matrix w(full.w.rows(), full.w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) w(i, i) = full.w(i, i);
    return CovEstimate{std::move(w), Method::op_wls, std::nullopt, std::nullopt};
}

CovEstimate w_shrink_schafer(const ResidualPanel& e, bool center) {
    require_samples(e, 3, "w_shrink_schafer");
    const std::size_t dim = e.dim();
    const double t_count = static_cast<double>(e.samples());
    Matrix by_level = panel_by_level(e, center);
    Matrix w_cov = gram_over_t(by_level);

    // Standardize each level so products x_i x_j average to r_ij.
    for (std::size_t l = 0; l < dim; ++l) {
        const double sd = std::sqrt(w_cov(l, l));
        if (sd == 0.0)
            throw DivisionError("w_shrink_schafer: level " + std::to_string(l + 1) +
                                    " has zero variance",
                                l + 1);
        kernels::scale(1.0 / sd, by_level.row(l), e.samples());
    }

    // Var(r_ij) estimated from the standardized products with the T/(T-1)^3
    // factor; lambda = sum Var(r_ij) / sum r_ij^2 over i != j, clipped.
    double var_sum = 0.0;
    double r_sq_sum = 0.0;
    const double var_factor = t_count / std::pow(t_count - 1.0, 3);
    for (std::size_t i = 0; i < dim; ++i) {
        const double* xi = by_level.row(i);
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double* xj = by_level.row(j);
            const double r = w_cov(i, j) / std::sqrt(w_cov(i, i) * w_cov(j, j));
            double acc = 0.0;
            for (std::size_t t = 0; t < e.samples(); ++t) {
                const double d = xi[t] * xj[t] - r;
                acc += d * d;
            }
            var_sum += 2.0 * var_factor * acc;
            r_sq_sum += 2.0 * r * r;
        }
    }
    double lambda = r_sq_sum == 0.0 ? 1.0 : var_sum / r_sq_sum;
    lambda = std::clamp(lambda, 0.0, 1.0);

    Matrix w(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            w(i, j) = i == j ? w_cov(i, j) : (1.0 - lambda) * w_cov(i, j);
    return CovEstimate{std::move(w), Method::op_shrink, lambda, std::nullopt};
}

CovEstimate w_ledoit_wolf(const ResidualPanel& e, bool center) {
    require_samples(e, 2, "w_ledoit_wolf");
    const std::size_t dim = e.dim();
    const std::size_t t_count = e.samples();
    const double t_d = static_cast<double>(t_count);
    Matrix by_level = panel_by_level(e, center);
    Matrix w_cov = gram_over_t(by_level);

    for (std::size_t l = 0; l < dim; ++l)
        if (w_cov(l, l) == 0.0)
            throw DivisionError("w_ledoit_wolf: level " + std::to_string(l + 1) +
                                    " has zero variance",
                                l + 1);

    // Mean correlation over the upper triangle.
    double r_bar = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            r_bar += w_cov(i, j) / std::sqrt(w_cov(i, i) * w_cov(j, j));
    r_bar *= 2.0 / (static_cast<double>(dim - 1) * static_cast<double>(dim));

    // Constant-correlation target F: same diagonal, off-diagonals
    // r_bar * sqrt(w_ii w_jj).
    Matrix f(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        f(i, i) = w_cov(i, i);
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double v = r_bar * std::sqrt(w_cov(i, i) * w_cov(j, j));
            f(i, j) = v;
            f(j, i) = v;
        }
    }

    // Intensity delta = clamp(kappa / T), kappa = (pi - rho) / gamma, with
    // pi the sum of Var(sqrt(T) w_ij), rho its correction for the target,
    // gamma the squared distance between target and sample.
    double pi_hat = 0.0;
    Matrix pi_mat(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double* xi = by_level.row(i);
        for (std::size_t j = i; j < dim; ++j) {
            const double* xj = by_level.row(j);
            double acc = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double d = xi[t] * xj[t] - w_cov(i, j);
                acc += d * d;
            }
            const double v = acc / t_d;
            pi_mat(i, j) = v;
            pi_mat(j, i) = v;
            pi_hat += i == j ? v : 2.0 * v;
        }
    }

    double rho_hat = 0.0;
    for (std::size_t i = 0; i < dim; ++i) rho_hat += pi_mat(i, i);
    for (std::size_t i = 0; i < dim; ++i) {
        const double* xi = by_level.row(i);
        for (std::size_t j = 0; j < dim; ++j) {
            if (j == i) continue;
            const double* xj = by_level.row(j);
            double theta_ii = 0.0;  // AsyCov(w_ii, w_ij)
            double theta_jj = 0.0;  // AsyCov(w_jj, w_ij)
            for (std::size_t t = 0; t < t_count; ++t) {
                const double prod = xi[t] * xj[t] - w_cov(i, j);
                theta_ii += (xi[t] * xi[t] - w_cov(i, i)) * prod;
                theta_jj += (xj[t] * xj[t] - w_cov(j, j)) * prod;
            }
            theta_ii /= t_d;
            theta_jj /= t_d;
            rho_hat += 0.5 * r_bar *
                       (std::sqrt(w_cov(j, j) / w_cov(i, i)) * theta_ii +
                        std::sqrt(w_cov(i, i) / w_cov(j, j)) * theta_jj);
        }
    }

    double gamma_hat = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = f(i, j) - w_cov(i, j);
            gamma_hat += d * d;
        }

    double delta;
    if (gamma_hat == 0.0) {
        delta = 0.0;  // target equals the sample, any weight is the same
    } else {
        const double kappa = (pi_hat - rho_hat) / gamma_hat;
        delta = std::clamp(kappa / t_d, 0.0, 1.0);
    }

    Matrix w(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            w(i, j) = delta * f(i, j) + (1.0 - delta) * w_cov(i, j);
    return CovEstimate{std::move(w), Method::op_ledoit_wolf, delta, std::nullopt};
}

CovEstimate w_glasso(const Matrix& w_sample, double rho) {
    const std::size_t dim = w_sample.rows();
    if (dim < 2 || w_sample.cols() != dim) throw DimensionError("w_glasso: sample matrix shape");
    if (rho < 0.0) throw ValueError("w_glasso: rho must be nonnegative");
    const Matrix s = symmetrize_checked(w_sample, 1e-10, "w_glasso");

    double diag_scale = 0.0;
    for (std::size_t i = 0; i < dim; ++i) diag_scale += std::abs(s(i, i));
    diag_scale /= static_cast<double>(dim);
    const double thr = 1e-7 * (diag_scale > 0.0 ? diag_scale : 1.0);
    constexpr std::size_t kMaxSweeps = 500;
    constexpr std::size_t kMaxInner = 1000;

    // W starts at S + rho I; each sweep re-solves the lasso subproblem of
    // every column against the current W_11 block.
    Matrix w = s;
    for (std::size_t i = 0; i < dim; ++i) w(i, i) += rho;
    Matrix beta(dim, dim);  // warm starts, row j holds beta for column j

    std::vector<std::size_t> rest(dim - 1);
    std::vector<double> residual(dim - 1);
    for (std::size_t sweep = 1; sweep <= kMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t col = 0; col < dim; ++col) {
            std::size_t r = 0;
            for (std::size_t i = 0; i < dim; ++i)
                if (i != col) rest[r++] = i;

            double* b = beta.row(col);
            // residual_l = s12_l - sum_m W11[l,m] beta_m, kept up to date as
            // coordinates move so each update costs one axpy. beta[col] is
            // never written and stays zero, so full rows of W can be used.
            for (std::size_t l = 0; l < dim - 1; ++l) {
                const std::size_t li = rest[l];
                residual[l] = s(li, col) - kernels::dot(w.row(li), b, dim);
            }
            for (std::size_t inner = 0; inner < kMaxInner; ++inner) {
                double max_step = 0.0;
                for (std::size_t l = 0; l < dim - 1; ++l) {
                    const std::size_t li = rest[l];
                    const double denom = w(li, li);
                    if (denom <= 0.0)
                        throw SingularMatrixError("w_glasso: nonpositive diagonal in W_11");
                    const double grad = residual[l] + denom * b[li];
                    double next = 0.0;
                    if (grad > rho)
                        next = (grad - rho) / denom;
                    else if (grad < -rho)
                        next = (grad + rho) / denom;
                    const double step = next - b[li];
                    if (step != 0.0) {
                        b[li] = next;
                        // residual[m] -= W(rest_m, li) * step; rest skips col,
                        // so row li of the symmetric W splits into two spans
                        kernels::axpy(-step, w.row(li), residual.data(), col);
                        kernels::axpy(-step, w.row(li) + col + 1, residual.data() + col,
                                      dim - 1 - col);
                        max_step = std::max(max_step, std::abs(step));
                    }
                }
                if (max_step <= thr) break;
            }

            for (std::size_t l = 0; l < dim - 1; ++l) {
                const std::size_t li = rest[l];
                // w12 = W11 beta = s12 - residual at convergence
                const double v = s(li, col) - residual[l];
                max_change = std::max(max_change, std::abs(w(li, col) - v));
                w(li, col) = v;
                w(col, li) = v;
            }
        }
        if (max_change <= thr)
            return CovEstimate{std::move(w), Method::op_glasso, std::nullopt, rho};
    }
    throw ConvergenceError("w_glasso: no convergence after " + std::to_string(kMaxSweeps) +
                               " sweeps",
                           kMaxSweeps);
}

CovEstimate estimate_covariance(Method scheme, const ResidualPanel* panel, std::size_t n,
                                const Matrix& summation, double rho, bool center) {
    switch (scheme) {
        case Method::op_ols:
            return w_identity(n);
        case Method::op_lambda:
            return w_lambda(summation);
        case Method::op_wls:
        case Method::op_cov:
        case Method::op_shrink:
        case Method::op_ledoit_wolf:
        case Method::op_glasso:
            break;
        default:
            throw ValueError("estimate_covariance: not a covariance scheme");
    }
    if (panel == nullptr) throw ValueError("estimate_covariance: scheme requires a residual panel");
    if (panel->dim() != 2 * n - 1)
        throw DimensionError("estimate_covariance: panel width must be 2n-1");
    switch (scheme) {
        case Method::op_wls:
            return w_diagonal(*panel, center);
        case Method::op_cov:
            return w_sample(*panel, center);
        case Method::op_shrink:
            return w_shrink_schafer(*panel, center);
        case Method::op_ledoit_wolf:
            return w_ledoit_wolf(*panel, center);
        default: {
            CovEstimate sample = w_sample(*panel, center);
            return w_glasso(sample.w, rho);
        }
    }
}

}  // namespace curverec
