#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "curverec/matrix.hpp"
#include "curverec/method.hpp"

namespace curverec {

enum class ErrorCovKind {
    identity,    // A = I
    correlated,  // A = 0.3 I + 0.7 11'
};

enum class TransformKind {
    none,
    square,  // square the simulated values before the hierarchy step
};

struct SimConfig {
    std::size_t bottom_dim = 16;   // n
    std::size_t history_len = 64;  // N
    double phi = 0.7;              // VAR(1) coefficient, Phi = phi * I
    ErrorCovKind error_cov = ErrorCovKind::identity;
    TransformKind transform = TransformKind::none;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    std::vector<Method> methods;  // empty means all fourteen
    // Derive base forecasts from the bottom-level fits alone (so the base
    // forecast is already coherent). Off by default; per-level fits
    // otherwise.
    bool base_from_bottom = false;
    std::size_t threads = 0;  // 0 = CURVE_RECONCILE_THREADS env, then auto
};

void validate(const SimConfig& config);

struct MethodResult {
    std::string name;             // "base" or a method token
    double rmse;                  // pooled over levels and replications
    double rmse_filtered;         // same, outlier replications removed
    std::size_t excluded = 0;     // replications dropped (errors / non-finite)
    std::vector<double> per_level_rmse;
};

struct SimResult {
    std::vector<MethodResult> methods;  // "base" first
    std::size_t outlier_count = 0;      // replications with |p_fo,1| > 50
    std::size_t replications = 0;

    const MethodResult* find(std::string_view name) const noexcept;
};

// One replication of the bottom-level VAR(1): (N+1) x n, last row is the
// evaluation target. 100 burn-in steps from a zero start are discarded.
// Deterministic in (config.seed, replication_index).
Matrix simulate_var1(const SimConfig& config, std::size_t replication_index);

// OLS slope without intercept: sum y_t y_{t-1} / sum y_{t-1}^2 over t = 2..len.
double fit_ar1(const double* series, std::size_t len);
double fit_ar1(const std::vector<double>& series);

SimResult run_experiment(const SimConfig& config);

struct ErrorMetricValues {
    double mae;
    double rmse;
};

// MAE over all cells; RMSE as the mean over rows of the per-row RMSE across
// the 24 columns.
ErrorMetricValues error_metrics(const Matrix& actual, const Matrix& forecast);

}  // namespace curverec
