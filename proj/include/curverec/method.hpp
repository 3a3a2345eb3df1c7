#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace curverec {

// The fourteen reconciliation methods. CLI and file formats use the short
// lowercase tokens ("bu", "tdar", ..., "opglasso").
enum class Method {
    bottom_up,
    td_average_ratio,
    td_ratio_of_averages,
    td_forecasted,
    ad_average_ratio,
    ad_ratio_of_averages,
    ad_forecasted,
    op_ols,
    op_lambda,
    op_wls,
    op_cov,
    op_shrink,
    op_ledoit_wolf,
    op_glasso,
};

const char* method_token(Method m) noexcept;
std::optional<Method> method_from_token(std::string_view token) noexcept;
std::vector<Method> all_methods();

bool is_optimal(Method m) noexcept;       // any of the op_* methods
bool needs_history(Method m) noexcept;    // ar / ra proportion sources
bool needs_residuals(Method m) noexcept;  // op_* methods estimated from data

}  // namespace curverec
