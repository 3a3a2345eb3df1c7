#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curverec/hierarchy.hpp"
#include "curverec/matrix.hpp"
#include "curverec/method.hpp"

namespace curverec {

enum class ProportionKind { top_down, aggregated_down };
enum class ProportionSource { average_ratio, ratio_of_averages, forecasted };

// Disaggregating proportions p (top-down) or q (aggregated-down).
struct Proportions {
    std::vector<double> values;
    ProportionKind kind;
    ProportionSource source;

    Proportions(std::vector<double> v, ProportionKind kind, ProportionSource source);
};

// The n x (2n-1) matrix P mapping base forecasts to bottom values.
struct MappingMatrix {
    Matrix p;
    Method method;

    std::size_t bottom_dim() const noexcept { return p.rows(); }
};

// A coherent forecast: y_tilde = S b_tilde by construction.
struct ReconciledForecast {
    std::vector<double> y_tilde;  // length 2n-1
    std::vector<double> b_tilde;  // length n
};

MappingMatrix mapping_bottom_up(std::size_t n);

// ar / ra proportions from a T x (2n-1) history of observed hierarchy values
// (columns ordered like y). Throws DivisionError on a zero denominator.
Proportions proportions_top_down(const Matrix& level_history, ProportionSource source);
Proportions proportions_aggregated_down(const Matrix& level_history, ProportionSource source);

// fo proportions evaluated on the base forecast itself.
Proportions proportions_top_down(const HierarchyVector& y_hat);
Proportions proportions_aggregated_down(const HierarchyVector& y_hat);

MappingMatrix mapping_top_down(const Proportions& p);
MappingMatrix mapping_aggregated_down(const Proportions& q);

// P = (S' W^-1 S)^-1 S' W^-1 via Cholesky solves; W is never inverted
// explicitly. W is symmetrized when its asymmetry is at most 1e-10 and
// rejected otherwise; a failed factorization raises SingularMatrixError
// naming `estimator_label`.
MappingMatrix mapping_optimal(const Matrix& summation, const Matrix& w, Method method,
                              std::string_view estimator_label = {});

// b_tilde = P y_hat, y_tilde = S b_tilde.
ReconciledForecast reconcile(const MappingMatrix& p, const Matrix& summation,
                             const HierarchyVector& y_hat);

// Optimal reconciliation carried out in representation k, plus the canonical
// image B_[k] y_tilde_[k]. For k == 1 this is exactly the canonical path.
struct RepresentationReconciled {
    HierarchyVector y_tilde_k;
    ReconciledForecast canonical;
};
RepresentationReconciled reconcile_in_representation(const HierarchyVector& y_hat_k,
                                                     const Matrix& w_k);

// Everything a method may need to build its mapping matrix.
struct MethodContext {
    const Matrix* level_history = nullptr;  // T x (2n-1) observed values (ar/ra)
    const Matrix* residuals = nullptr;      // T x (2n-1) base-forecast errors (op_*)
    double glasso_rho = 0.1;
    bool center = false;
};

MappingMatrix make_mapping(Method m, const HierarchyVector& y_hat, const Matrix& summation,
                           const MethodContext& ctx);

}  // namespace curverec
