#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "curverec/covariance.hpp"
#include "curverec/errors.hpp"
#include "curverec/hierarchy.hpp"
#include "curverec/linalg.hpp"
#include "curverec/reconcile.hpp"
#include "curverec/rng.hpp"

using namespace curverec;

namespace {

// ---- from-definition oracles, written independently of the library path ----

Matrix sample_cov_oracle(const Matrix& e) {
    const std::size_t t_count = e.rows();
    const std::size_t dim = e.cols();
    Matrix w(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) acc += e(t, i) * e(t, j);
            w(i, j) = acc / static_cast<double>(t_count);
        }
    return w;
}

// Schafer-Strimmer intensity straight from the definition: standardize,
// form the products w_tij, and take T/(T-1)^3 * sum (w_tij - mean)^2 over
// the off-diagonal pairs divided by the squared correlations.
double schafer_lambda_oracle(const Matrix& e) {
    const std::size_t t_count = e.rows();
    const std::size_t dim = e.cols();
    const Matrix cov = sample_cov_oracle(e);
    Matrix x(t_count, dim);
    for (std::size_t t = 0; t < t_count; ++t)
        for (std::size_t i = 0; i < dim; ++i) x(t, i) = e(t, i) / std::sqrt(cov(i, i));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            if (i == j) continue;
            double mean = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) mean += x(t, i) * x(t, j);
            mean /= static_cast<double>(t_count);
            double var = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double d = x(t, i) * x(t, j) - mean;
                var += d * d;
            }
            var *= static_cast<double>(t_count) / std::pow(t_count - 1.0, 3);
            num += var;
            den += mean * mean;
        }
    return den == 0.0 ? 1.0 : std::min(1.0, std::max(0.0, num / den));
}

// Ledoit-Wolf intensity from the published pi / rho / gamma decomposition.
double ledoit_wolf_delta_oracle(const Matrix& e) {
    const std::size_t t_count = e.rows();
    const std::size_t dim = e.cols();
    const Matrix cov = sample_cov_oracle(e);
    double r_bar = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            r_bar += cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
    r_bar *= 2.0 / (static_cast<double>(dim) * static_cast<double>(dim - 1));

    double pi_hat = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double d = e(t, i) * e(t, j) - cov(i, j);
                acc += d * d;
            }
            pi_hat += acc / static_cast<double>(t_count);
        }

    double rho_hat = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) {
            const double d = e(t, i) * e(t, i) - cov(i, i);
            acc += d * d;
        }
        rho_hat += acc / static_cast<double>(t_count);
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            if (i == j) continue;
            double theta_ii = 0.0, theta_jj = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double prod = e(t, i) * e(t, j) - cov(i, j);
                theta_ii += (e(t, i) * e(t, i) - cov(i, i)) * prod;
                theta_jj += (e(t, j) * e(t, j) - cov(j, j)) * prod;
            }
            theta_ii /= static_cast<double>(t_count);
            theta_jj /= static_cast<double>(t_count);
            rho_hat += 0.5 * r_bar *
                       (std::sqrt(cov(j, j) / cov(i, i)) * theta_ii +
                        std::sqrt(cov(i, i) / cov(j, j)) * theta_jj);
        }

    double gamma_hat = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            const double f = i == j ? cov(i, i) : r_bar * std::sqrt(cov(i, i) * cov(j, j));
            gamma_hat += (f - cov(i, j)) * (f - cov(i, j));
        }
    if (gamma_hat == 0.0) return 0.0;
    const double kappa = (pi_hat - rho_hat) / gamma_hat;
    return std::min(1.0, std::max(0.0, kappa / static_cast<double>(t_count)));
}

// Slow graphical lasso reference: coordinate descent run to 1e-10 with a
// randomized (but seeded) coordinate order each pass.
Matrix glasso_slow_reference(const Matrix& s, double rho) {
    const std::size_t dim = s.rows();
    Matrix w = s;
    for (std::size_t i = 0; i < dim; ++i) w(i, i) += rho;
    Matrix beta(dim, dim);
    rng::Stream order_stream(2024, 0, 0);
    std::uint64_t draw = 0;
    for (std::size_t sweep = 0; sweep < 4000; ++sweep) {
        double max_change = 0.0;
        for (std::size_t col = 0; col < dim; ++col) {
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < dim; ++i)
                if (i != col) rest.push_back(i);
            double* b = beta.row(col);
            for (std::size_t pass = 0; pass < 4000; ++pass) {
                double max_step = 0.0;
                std::vector<std::size_t> shuffled = rest;
                for (std::size_t i = shuffled.size(); i > 1; --i) {
                    const std::size_t j = static_cast<std::size_t>(
                        order_stream.uniform(draw++) * static_cast<double>(i));
                    std::swap(shuffled[i - 1], shuffled[j]);
                }
                for (std::size_t li : shuffled) {
                    double grad = s(li, col);
                    for (std::size_t mi : rest)
                        if (mi != li) grad -= w(li, mi) * b[mi];
                    double next = 0.0;
                    if (grad > rho)
                        next = (grad - rho) / w(li, li);
                    else if (grad < -rho)
                        next = (grad + rho) / w(li, li);
                    max_step = std::max(max_step, std::abs(next - b[li]));
                    b[li] = next;
                }
                if (max_step <= 1e-12) break;
            }
            for (std::size_t li : rest) {
                double v = 0.0;
                for (std::size_t mi : rest) v += w(li, mi) * b[mi];
                max_change = std::max(max_change, std::abs(w(li, col) - v));
                w(li, col) = v;
                w(col, li) = v;
            }
        }
        if (max_change <= 1e-10) break;
    }
    return w;
}

Matrix fixed_panel_5x3() {
    return Matrix::from_rows({{1.2, -0.4, 0.3},
                              {-0.7, 0.9, 1.1},
                              {0.5, 0.2, -0.8},
                              {2.0, -1.5, 0.6},
                              {-0.3, 0.7, -1.2}});
}

Matrix fixed_panel_6x3() {
    return Matrix::from_rows({{0.9, -1.1, 0.4},
                              {-0.2, 0.8, 1.3},
                              {1.5, 0.3, -0.5},
                              {-1.0, -0.6, 0.7},
                              {0.4, 1.2, -0.9},
                              {2.1, -0.7, 0.2}});
}

Matrix random_panel(std::size_t t_count, std::size_t dim, std::uint64_t series) {
    rng::Stream stream(31337, series, 0);
    Matrix e(t_count, dim);
    for (std::size_t t = 0; t < t_count; ++t)
        for (std::size_t l = 0; l < dim; ++l) e(t, l) = stream.normal(t * dim + l);
    return e;
}

std::size_t count_offdiag_above(const Matrix& w, double tol) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j)
            if (i != j && std::abs(w(i, j)) > tol) ++count;
    return count;
}

}  // namespace

TEST_CASE("identity weight") {
    const CovEstimate w = w_identity(2);
    CHECK(max_abs_diff(w.w, Matrix::identity(3)) == 0.0);
    double trace = 0.0;
    const CovEstimate w3 = w_identity(3);
    for (std::size_t i = 0; i < 5; ++i) trace += w3.w(i, i);
    CHECK(trace == 5.0);
    // the resulting optimal mapping is (S'S)^-1 S'
    const Matrix s = summation_matrix(3, 1);
    const MappingMatrix p = mapping_optimal(s, w3.w, Method::op_ols);
    const Matrix gram = matmul(transpose(s), s);
    const Matrix expected = cholesky(gram)->solve(transpose(s));
    CHECK(max_abs_diff(p.p, expected) <= 1e-12);
}

TEST_CASE("aggregation-level weight") {
    const CovEstimate w3 = w_lambda(summation_matrix(3, 1));
    const std::vector<double> want{3, 2, 1, 1, 1};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(w3.w(i, i) == want[i]);
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j) CHECK(w3.w(i, j) == 0.0);
    }
    const CovEstimate w2 = w_lambda(summation_matrix(2, 1));
    CHECK(w2.w(0, 0) == 2.0);
    CHECK(w2.w(1, 1) == 1.0);
    CHECK(w2.w(2, 2) == 1.0);
    // differs from the identity in exactly one entry at n = 2
    std::size_t diffs = 0;
    const Matrix eye = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (w2.w(i, j) != eye(i, j)) ++diffs;
    CHECK(diffs == 1);
}

TEST_CASE("sample covariance") {
    const ResidualPanel panel(Matrix::from_rows({{1, 0}, {-1, 0}}));
    const CovEstimate w = w_sample(panel);
    CHECK(max_abs_diff(w.w, Matrix::from_rows({{1, 0}, {0, 0}})) == 0.0);
    CHECK_THROWS_AS(w_sample(ResidualPanel(Matrix::from_rows({{1.0, 2.0}}))),
                    InsufficientDataError);

    // a zero column produces a zero row and column
    const ResidualPanel z(Matrix::from_rows({{1, 0, 2}, {3, 0, -1}, {0.5, 0, 0.5}}));
    const CovEstimate wz = w_sample(z);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(wz.w(1, i) == 0.0);
        CHECK(wz.w(i, 1) == 0.0);
    }

    // Gram matrices are positive semidefinite
    const Matrix e = random_panel(12, 5, 1);
    const CovEstimate wr = w_sample(ResidualPanel(e));
    rng::Stream probe(5150, 0, 0);
    for (std::size_t trial = 0; trial < 50; ++trial) {
        std::vector<double> x(5);
        for (std::size_t i = 0; i < 5; ++i) x[i] = probe.normal(trial * 5 + i);
        double quad = 0.0;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) quad += x[i] * wr.w(i, j) * x[j];
        CHECK(quad >= -1e-10);
    }
}

TEST_CASE("diagonal covariance") {
    const ResidualPanel panel(Matrix::from_rows({{1, 0}, {-1, 0}}));
    const CovEstimate w = w_diagonal(panel);
    CHECK(max_abs_diff(w.w, Matrix::from_rows({{1, 0}, {0, 0}})) == 0.0);

    const Matrix e = random_panel(9, 4, 2);
    const CovEstimate d1 = w_diagonal(ResidualPanel(e));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) CHECK(d1.w(i, j) == 0.0);
    // idempotent: the diagonal of a diagonal matrix is itself. Feed residuals
    // whose sample covariance is already diagonal.
    const ResidualPanel single(Matrix::from_rows({{2, 0}, {-2, 0}, {1, 0}}));
    CHECK(max_abs_diff(w_diagonal(single).w, w_sample(single).w) == 0.0);
}

TEST_CASE("shrinkage intensity matches the from-definition oracle") {
    for (const Matrix& e : {fixed_panel_5x3(), fixed_panel_6x3()}) {
        const CovEstimate w = w_shrink_schafer(ResidualPanel(e));
        REQUIRE(w.shrinkage.has_value());
        CHECK(std::abs(*w.shrinkage - schafer_lambda_oracle(e)) <= 1e-10);
        // reconstruction: W = lambda diag(cov) + (1 - lambda) cov
        const Matrix cov = sample_cov_oracle(e);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                const double want =
                    i == j ? cov(i, j) : (1.0 - *w.shrinkage) * cov(i, j);
                CHECK(w.w(i, j) == doctest::Approx(want).epsilon(1e-12));
            }
    }
    CHECK_THROWS_AS(w_shrink_schafer(ResidualPanel(Matrix::from_rows({{1, 2}, {2, 1}}))),
                    InsufficientDataError);
}

TEST_CASE("shrinkage limits") {
    // duplicated columns: correlations are exactly 1 and stable, so the
    // intensity decays like 1/T and the estimate approaches the sample
    const std::size_t t_count = 4000;
    Matrix dup(t_count, 2);
    rng::Stream stream(88, 0, 0);
    for (std::size_t t = 0; t < t_count; ++t) {
        const double v = stream.normal(t);
        dup(t, 0) = v;
        dup(t, 1) = v;
    }
    const CovEstimate w = w_shrink_schafer(ResidualPanel(dup));
    CHECK(*w.shrinkage <= 0.01);
    CHECK(max_abs_diff(w.w, sample_cov_oracle(dup)) <= 0.01);

    // zero-variance column is a division error naming the column
    Matrix zero_col = random_panel(6, 3, 3);
    for (std::size_t t = 0; t < 6; ++t) zero_col(t, 1) = 0.0;
    CHECK_THROWS_AS(w_shrink_schafer(ResidualPanel(zero_col)), DivisionError);

    // exactly orthogonal columns: every correlation is zero, so the target
    // equals the source diagonal and the blend is the diagonal either way
    const Matrix orth = Matrix::from_rows(
        {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
    const CovEstimate wo = w_shrink_schafer(ResidualPanel(orth));
    CHECK(max_abs_diff(wo.w, Matrix::identity(3)) == 0.0);  // cov is I here
}

TEST_CASE("shrinkage keeps positive definiteness on positive-variance panels") {
    const Matrix e = random_panel(4, 7, 4);  // fewer samples than levels
    const CovEstimate w = w_shrink_schafer(ResidualPanel(e));
    REQUIRE(w.shrinkage.has_value());
    CHECK(*w.shrinkage > 0.0);
    CHECK(cholesky(w.w).has_value());
}

TEST_CASE("ledoit-wolf estimate") {
    const Matrix e = fixed_panel_6x3();
    const CovEstimate w = w_ledoit_wolf(ResidualPanel(e));
    REQUIRE(w.shrinkage.has_value());
    CHECK(std::abs(*w.shrinkage - ledoit_wolf_delta_oracle(e)) <= 1e-10);

    // the target leaves the diagonal alone
    const Matrix cov = sample_cov_oracle(e);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(w.w(i, i) == doctest::Approx(cov(i, i)).epsilon(1e-12));

    // blend reconstruction: W = delta F + (1 - delta) cov with the constant
    // correlation target built from scratch
    double r_bar = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            r_bar += cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
    r_bar /= 3.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const double f = i == j ? cov(i, i) : r_bar * std::sqrt(cov(i, i) * cov(j, j));
            const double want = *w.shrinkage * f + (1.0 - *w.shrinkage) * cov(i, j);
            CHECK(w.w(i, j) == doctest::Approx(want).epsilon(1e-12));
        }

    // two columns: the mean correlation is the single correlation, so the
    // target reproduces the sample and the blend is exact
    Matrix two = random_panel(8, 2, 5);
    const CovEstimate w2 = w_ledoit_wolf(ResidualPanel(two));
    const Matrix cov2 = sample_cov_oracle(two);
    CHECK(max_abs_diff(w2.w, cov2) <= 1e-12);
}

TEST_CASE("graphical lasso limits") {
    const Matrix e = random_panel(24, 5, 6);
    const Matrix s = sample_cov_oracle(e);

    // rho = 0 returns the SPD sample covariance
    const CovEstimate w0 = w_glasso(s, 0.0);
    CHECK(max_abs_diff(w0.w, s) <= 1e-6);

    // rho beyond the largest off-diagonal kills every off-diagonal
    double rho_max = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j) rho_max = std::max(rho_max, std::abs(s(i, j)));
    const CovEstimate wfull = w_glasso(s, rho_max * 1.01);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            if (i == j)
                CHECK(wfull.w(i, i) == doctest::Approx(s(i, i) + rho_max * 1.01).epsilon(1e-12));
            else
                CHECK(std::abs(wfull.w(i, j)) <= 1e-7);
        }
    CHECK_THROWS_AS(w_glasso(s, -0.1), ValueError);
}

TEST_CASE("graphical lasso agrees with the slow randomized reference") {
    const Matrix s = Matrix::from_rows({{2.0, 0.6, -0.3}, {0.6, 1.5, 0.4}, {-0.3, 0.4, 1.8}});
    const CovEstimate w = w_glasso(s, 0.1);
    const Matrix reference = glasso_slow_reference(s, 0.1);
    CHECK(max_abs_diff(w.w, reference) <= 1e-5);
}

TEST_CASE("graphical lasso sparsity is monotone in rho") {
    const Matrix e = random_panel(30, 6, 7);
    const Matrix s = sample_cov_oracle(e);
    std::size_t previous = 1000;
    for (double rho : {0.0, 0.01, 0.1, 1.0, 10.0}) {
        const CovEstimate w = w_glasso(s, rho);
        const std::size_t nonzero = count_offdiag_above(w.w, 1e-7);
        CHECK(nonzero <= previous);
        previous = nonzero;
    }
}

TEST_CASE("every estimator returns a symmetric matrix of the right size") {
    const Matrix e = random_panel(20, 7, 8);
    const ResidualPanel panel(e);
    const Matrix s = summation_matrix(4, 1);
    const std::vector<CovEstimate> all{
        w_identity(4),           w_lambda(s),          w_sample(panel),
        w_diagonal(panel),       w_shrink_schafer(panel), w_ledoit_wolf(panel),
        w_glasso(sample_cov_oracle(e), 0.05),
    };
    for (const CovEstimate& w : all) {
        CHECK(w.w.rows() == 7);
        CHECK(w.w.cols() == 7);
        CHECK(max_asymmetry(w.w) <= 1e-12);
    }
}

TEST_CASE("centering flag recenters the panel") {
    Matrix shifted = random_panel(15, 3, 9);
    for (std::size_t t = 0; t < 15; ++t) shifted(t, 0) += 10.0;
    const CovEstimate raw = w_sample(ResidualPanel(shifted));
    const CovEstimate centered = w_sample(ResidualPanel(shifted), true);
    CHECK(raw.w(0, 0) > centered.w(0, 0) + 50.0);  // the mean dominates raw
    Matrix manual = shifted;
    for (std::size_t c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (std::size_t t = 0; t < 15; ++t) mean += shifted(t, c);
        mean /= 15.0;
        for (std::size_t t = 0; t < 15; ++t) manual(t, c) -= mean;
    }
    CHECK(max_abs_diff(centered.w, sample_cov_oracle(manual)) <= 1e-12);
}
