#include "curverec/reconcile.hpp"

#include <array>
#include <cmath>
#include <string>

#include "curverec/covariance.hpp"
#include "curverec/errors.hpp"
#include "curverec/kernels.hpp"
#include "curverec/linalg.hpp"

namespace curverec {

namespace {

constexpr std::array<std::pair<Method, const char*>, 14> kTokens{{
    {Method::bottom_up, "bu"},
    {Method::td_average_ratio, "tdar"},
    {Method::td_ratio_of_averages, "tdra"},
    {Method::td_forecasted, "tdfo"},
    {Method::ad_average_ratio, "adar"},
    {Method::ad_ratio_of_averages, "adra"},
    {Method::ad_forecasted, "adfo"},
    {Method::op_ols, "opols"},
    {Method::op_lambda, "oplambda"},
    {Method::op_wls, "opwls"},
    {Method::op_cov, "opcov"},
    {Method::op_shrink, "opshrink"},
    {Method::op_ledoit_wolf, "opledoitwolf"},
    {Method::op_glasso, "opglasso"},
}};

// Column of a_i within the y layout (0-based); a_1 is the shared node b_1.
std::size_t aggregate_col(std::size_t n, std::size_t i) {
    return i == 1 ? n - 1 : n - i;
}

std::size_t bottom_col(std::size_t n, std::size_t j) { return n - 1 + (j - 1); }

void check_history(const Matrix& history, const char* op) {
    if (history.rows() < 1) throw InsufficientDataError(std::string(op) + ": empty history");
    if (history.cols() < 3 || history.cols() % 2 == 0)
        throw DimensionError(std::string(op) + ": history must have 2n-1 columns");
}

}  // namespace

const char* method_token(Method m) noexcept {
    for (const auto& [method, token] : kTokens)
        if (method == m) return token;
    return "?";
}

std::optional<Method> method_from_token(std::string_view token) noexcept {
    for (const auto& [method, tok] : kTokens)
        if (token == tok) return method;
    return std::nullopt;
}

std::vector<Method> all_methods() {
    std::vector<Method> out;
    out.reserve(kTokens.size());
    for (const auto& [method, token] : kTokens) out.push_back(method);
    return out;
}

bool is_optimal(Method m) noexcept {
    switch (m) {
        case Method::op_ols:
        case Method::op_lambda:
        case Method::op_wls:
        case Method::op_cov:
        case Method::op_shrink:
        case Method::op_ledoit_wolf:
        case Method::op_glasso:
            return true;
        default:
            return false;
    }
}

bool needs_history(Method m) noexcept {
    switch (m) {
        case Method::td_average_ratio:
        case Method::td_ratio_of_averages:
        case Method::ad_average_ratio:
        case Method::ad_ratio_of_averages:
            return true;
        default:
            return false;
    }
}

bool needs_residuals(Method m) noexcept {
    switch (m) {
        case Method::op_wls:
        case Method::op_cov:
        case Method::op_shrink:
        case Method::op_ledoit_wolf:
        case Method::op_glasso:
            return true;
        default:
            return false;
    }
}

Proportions::Proportions(std::vector<double> v, ProportionKind kind, ProportionSource source)
    : values(std::move(v)), kind(kind), source(source) {
    if (values.empty()) throw DimensionError("Proportions: empty");
    if (!all_finite(values)) throw ValueError("Proportions: entries must be finite");
    if (kind == ProportionKind::aggregated_down && values[0] != 1.0)
        throw ValueError("Proportions: aggregated-down requires q_1 == 1");
}

MappingMatrix mapping_bottom_up(std::size_t n) {
    if (n < 2) throw DimensionError("mapping_bottom_up: n must be at least 2");
    Matrix p(n, 2 * n - 1);
    for (std::size_t j = 0; j < n; ++j) p(j, n - 1 + j) = 1.0;
    return MappingMatrix{std::move(p), Method::bottom_up};
}

Proportions proportions_top_down(const Matrix& history, ProportionSource source) {
    check_history(history, "proportions_top_down");
    const std::size_t n = (history.cols() + 1) / 2;
    const std::size_t t_count = history.rows();
    std::vector<double> p(n, 0.0);
    if (source == ProportionSource::average_ratio) {
        for (std::size_t t = 0; t < t_count; ++t) {
            const double top = history(t, aggregate_col(n, n));
            if (top == 0.0)
                throw DivisionError("proportions_top_down: a_n is zero at sample " +
                                        std::to_string(t + 1),
                                    t + 1);
            for (std::size_t j = 1; j <= n; ++j) p[j - 1] += history(t, bottom_col(n, j)) / top;
        }
        for (double& v : p) v /= static_cast<double>(t_count);
    } else if (source == ProportionSource::ratio_of_averages) {
        double top_mean = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) top_mean += history(t, aggregate_col(n, n));
        top_mean /= static_cast<double>(t_count);
        if (top_mean == 0.0)
            throw DivisionError("proportions_top_down: mean of a_n is zero", 0);
        for (std::size_t j = 1; j <= n; ++j) {
            double bj = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) bj += history(t, bottom_col(n, j));
            p[j - 1] = bj / static_cast<double>(t_count) / top_mean;
        }
    } else {
        throw ValueError("proportions_top_down: forecasted source needs a base forecast");
    }
    return Proportions(std::move(p), ProportionKind::top_down, source);
}

Proportions proportions_top_down(const HierarchyVector& y_hat) {
    if (y_hat.k != 1) throw ValueError("proportions_top_down: base forecast must be canonical");
    const std::size_t n = y_hat.bottom_dim();
    // f_i = a_i / (a_i + b_{i+1}); a zero denominator at junction i poisons
    // every proportion below it, which is exactly the hazard this method has.
    std::vector<double> factor(n - 1);
    for (std::size_t i = 1; i <= n - 1; ++i) {
        const double den = y_hat.aggregate(i) + y_hat.bottom(i + 1);
        if (den == 0.0)
            throw DivisionError("proportions_top_down: a_" + std::to_string(i) + " + b_" +
                                    std::to_string(i + 1) + " is zero",
                                i + 1);
        factor[i - 1] = y_hat.aggregate(i) / den;
    }
    // suffix[j] = prod_{i=j..n-1} f_i, suffix[n] = 1
    std::vector<double> suffix(n + 1, 1.0);
    for (std::size_t i = n - 1; i >= 1; --i) suffix[i] = factor[i - 1] * suffix[i + 1];
    std::vector<double> p(n);
    p[0] = suffix[1];
    for (std::size_t j = 2; j <= n; ++j) {
        const double den = y_hat.aggregate(j - 1) + y_hat.bottom(j);
        // den != 0 was already checked as junction j-1
        p[j - 1] = y_hat.bottom(j) / den * suffix[j];
    }
    return Proportions(std::move(p), ProportionKind::top_down, ProportionSource::forecasted);
}

Proportions proportions_aggregated_down(const Matrix& history, ProportionSource source) {
    check_history(history, "proportions_aggregated_down");
    const std::size_t n = (history.cols() + 1) / 2;
    const std::size_t t_count = history.rows();
    std::vector<double> q(n, 0.0);
    q[0] = 1.0;
    if (source == ProportionSource::average_ratio) {
        for (std::size_t j = 2; j <= n; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double aj = history(t, aggregate_col(n, j));
                if (aj == 0.0)
                    throw DivisionError("proportions_aggregated_down: a_" + std::to_string(j) +
                                            " is zero at sample " + std::to_string(t + 1),
                                        j);
                acc += history(t, bottom_col(n, j)) / aj;
            }
            q[j - 1] = acc / static_cast<double>(t_count);
        }
    } else if (source == ProportionSource::ratio_of_averages) {
        for (std::size_t j = 2; j <= n; ++j) {
            double bj = 0.0;
            double aj = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                bj += history(t, bottom_col(n, j));
                aj += history(t, aggregate_col(n, j));
            }
            if (aj == 0.0)
                throw DivisionError(
                    "proportions_aggregated_down: mean of a_" + std::to_string(j) + " is zero", j);
            q[j - 1] = bj / aj;
        }
    } else {
        throw ValueError("proportions_aggregated_down: forecasted source needs a base forecast");
    }
    return Proportions(std::move(q), ProportionKind::aggregated_down, source);
}

Proportions proportions_aggregated_down(const HierarchyVector& y_hat) {
    if (y_hat.k != 1)
        throw ValueError("proportions_aggregated_down: base forecast must be canonical");
    const std::size_t n = y_hat.bottom_dim();
    std::vector<double> q(n);
    q[0] = 1.0;
    for (std::size_t j = 2; j <= n; ++j) {
        const double aj = y_hat.aggregate(j);
        if (aj == 0.0)
            throw DivisionError("proportions_aggregated_down: a_" + std::to_string(j) + " is zero",
                                j);
        q[j - 1] = (aj - y_hat.aggregate(j - 1)) / aj;
    }
    return Proportions(std::move(q), ProportionKind::aggregated_down,
                       ProportionSource::forecasted);
}

MappingMatrix mapping_top_down(const Proportions& p) {
    if (p.kind != ProportionKind::top_down)
        throw ValueError("mapping_top_down: proportions are not top-down");
    const std::size_t n = p.values.size();
    if (n < 2) throw DimensionError("mapping_top_down: n must be at least 2");
    Matrix m(n, 2 * n - 1);
    for (std::size_t j = 0; j < n; ++j) m(j, 0) = p.values[j];
    Method method = p.source == ProportionSource::average_ratio   ? Method::td_average_ratio
                    : p.source == ProportionSource::ratio_of_averages
                        ? Method::td_ratio_of_averages
                        : Method::td_forecasted;
    return MappingMatrix{std::move(m), method};
}

MappingMatrix mapping_aggregated_down(const Proportions& q) {
    if (q.kind != ProportionKind::aggregated_down)
        throw ValueError("mapping_aggregated_down: proportions are not aggregated-down");
    if (q.values[0] != 1.0) throw ValueError("mapping_aggregated_down: q_1 must be 1");
    const std::size_t n = q.values.size();
    if (n < 2) throw DimensionError("mapping_aggregated_down: n must be at least 2");
    // Q = Antidiag(q): row j picks up y_{n-j+1}, which is a_j (a_1 being the
    // shared node), so b_tilde_j = q_j a_j.
    Matrix m(n, 2 * n - 1);
    for (std::size_t j = 1; j <= n; ++j) m(j - 1, n - j) = q.values[j - 1];
    Method method = q.source == ProportionSource::average_ratio   ? Method::ad_average_ratio
                    : q.source == ProportionSource::ratio_of_averages
                        ? Method::ad_ratio_of_averages
                        : Method::ad_forecasted;
    return MappingMatrix{std::move(m), method};
}

MappingMatrix mapping_optimal(const Matrix& summation, const Matrix& w, Method method,
                              std::string_view estimator_label) {
    const std::size_t levels = summation.rows();
    const std::size_t n = summation.cols();
    if (levels != 2 * n - 1) throw DimensionError("mapping_optimal: summation matrix shape");
    if (w.rows() != levels || w.cols() != levels)
        throw DimensionError("mapping_optimal: W must be (2n-1) x (2n-1)");
    const std::string label =
        estimator_label.empty() ? std::string(method_token(method)) : std::string(estimator_label);

    const Matrix w_sym = symmetrize_checked(w, 1e-10, "mapping_optimal");
    auto w_chol = cholesky(w_sym);
    if (!w_chol)
        throw SingularMatrixError("singular covariance (" + label +
                                  "): W is not positive definite");
    // X = W^-1 S, G = S' X = S' W^-1 S, P = G^-1 X'
    Matrix x = w_chol->solve(summation);
    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < levels; ++r) acc += summation(r, i) * x(r, j);
            gram(i, j) = acc;
        }
    gram = symmetrize_checked(gram, 1e-6, "mapping_optimal gram");
    auto g_chol = cholesky(gram);
    if (!g_chol)
        throw SingularMatrixError("singular covariance (" + label +
                                  "): S'W^-1S is not positive definite");
    Matrix p = g_chol->solve(transpose(x));
    return MappingMatrix{std::move(p), method};
}

ReconciledForecast reconcile(const MappingMatrix& p, const Matrix& summation,
                             const HierarchyVector& y_hat) {
    const std::size_t n = p.bottom_dim();
    if (p.p.cols() != y_hat.size() || summation.rows() != y_hat.size() || summation.cols() != n)
        throw DimensionError("reconcile: dimensions disagree");
    if (!all_finite(y_hat.values)) throw ValueError("reconcile: base forecast must be finite");
    ReconciledForecast out;
    out.b_tilde = matvec(p.p, y_hat.values);
    out.y_tilde = matvec(summation, out.b_tilde);
    return out;
}

RepresentationReconciled reconcile_in_representation(const HierarchyVector& y_hat_k,
                                                     const Matrix& w_k) {
    const std::size_t n = y_hat_k.bottom_dim();
    const std::size_t k = y_hat_k.k;
    const Matrix s_k = summation_matrix(n, k);
    MappingMatrix p_k = mapping_optimal(s_k, w_k, Method::op_cov, "W_[k]");
    ReconciledForecast rep = reconcile(p_k, s_k, y_hat_k);
    if (k == 1) {
        HierarchyVector y_tilde_k(rep.y_tilde, 1);
        return RepresentationReconciled{std::move(y_tilde_k), std::move(rep)};
    }
    const Matrix b_k = basis_change_matrix(n, k);
    ReconciledForecast canonical;
    canonical.y_tilde = matvec(b_k, rep.y_tilde);
    canonical.b_tilde.assign(canonical.y_tilde.begin() + (n - 1), canonical.y_tilde.end());
    return RepresentationReconciled{HierarchyVector(rep.y_tilde, k), std::move(canonical)};
}

MappingMatrix make_mapping(Method m, const HierarchyVector& y_hat, const Matrix& summation,
                           const MethodContext& ctx) {
    const std::size_t n = y_hat.bottom_dim();
    switch (m) {
        case Method::bottom_up:
            return mapping_bottom_up(n);
        case Method::td_average_ratio:
        case Method::td_ratio_of_averages: {
            if (ctx.level_history == nullptr)
                throw ValueError("method requires a history of observed values");
            auto src = m == Method::td_average_ratio ? ProportionSource::average_ratio
                                                     : ProportionSource::ratio_of_averages;
            return mapping_top_down(proportions_top_down(*ctx.level_history, src));
        }
        case Method::td_forecasted:
            return mapping_top_down(proportions_top_down(y_hat));
        case Method::ad_average_ratio:
        case Method::ad_ratio_of_averages: {
            if (ctx.level_history == nullptr)
                throw ValueError("method requires a history of observed values");
            auto src = m == Method::ad_average_ratio ? ProportionSource::average_ratio
                                                     : ProportionSource::ratio_of_averages;
            return mapping_aggregated_down(proportions_aggregated_down(*ctx.level_history, src));
        }
        case Method::ad_forecasted:
            return mapping_aggregated_down(proportions_aggregated_down(y_hat));
        default: {
            std::optional<ResidualPanel> panel;
            if (needs_residuals(m)) {
                if (ctx.residuals == nullptr)
                    throw ValueError("method requires a residual panel");
                panel.emplace(*ctx.residuals);
            }
            CovEstimate w = estimate_covariance(m, panel ? &*panel : nullptr, n, summation,
                                                ctx.glasso_rho, ctx.center);
            return mapping_optimal(summation, w.w, m);
        }
    }
}

}  // namespace curverec
