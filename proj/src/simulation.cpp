#include "curverec/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "curverec/errors.hpp"
#include "curverec/hierarchy.hpp"
#include "curverec/kernels.hpp"
#include "curverec/reconcile.hpp"
#include "curverec/rng.hpp"

namespace curverec {

namespace {

constexpr std::size_t kBurnIn = 100;
constexpr double kOutlierLimit = 50.0;

std::vector<Method> resolved_methods(const SimConfig& config) {
    std::vector<Method> methods = config.methods.empty() ? all_methods() : config.methods;
    std::vector<Method> out;
    for (Method m : methods)
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    return out;
}

std::size_t resolve_threads(const SimConfig& config) {
    std::size_t threads = config.threads;
    if (threads == 0) {
        if (const char* env = std::getenv("CURVE_RECONCILE_THREADS")) {
            char* end = nullptr;
            const unsigned long parsed = std::strtoul(env, &end, 10);
            if (end != env && *end == '\0') threads = static_cast<std::size_t>(parsed);
        }
    }
    if (threads == 0) threads = std::max<unsigned>(1, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(threads, config.replications));
}

// Squared errors of one replication: slot 0 is the pooled total, slots
// 1..levels the per-level contributions. NaN totals mark excluded results.
struct RepRecord {
    bool outlier = false;
    std::vector<double> sums;  // (methods + 1) * (levels + 1)
};

}  // namespace

void validate(const SimConfig& config) {
    if (config.bottom_dim < 2) throw DimensionError("SimConfig: n must be at least 2");
    if (config.history_len < 2) throw DimensionError("SimConfig: N must be at least 2");
    if (!(std::abs(config.phi) < 1.0)) throw ValueError("SimConfig: |phi| must be below 1");
    if (config.replications < 1) throw ValueError("SimConfig: at least one replication");
}

Matrix simulate_var1(const SimConfig& config, std::size_t replication_index) {
    validate(config);
    const std::size_t n = config.bottom_dim;
    const std::size_t rows = config.history_len + 1;
    const double coeff = config.phi;
    const bool correlated = config.error_cov == ErrorCovKind::correlated;
    // A = 0.3 I + 0.7 11' realized as sqrt(0.3) z_i + sqrt(0.7) c with a
    // shared factor stream; series stream 0 is the factor, 1..n the series.
    const double own = correlated ? std::sqrt(0.3) : 1.0;
    const double shared = correlated ? std::sqrt(0.7) : 0.0;

    rng::Stream factor(config.seed, replication_index, 0);
    Matrix out(rows, n);
    std::vector<double> state(n, 0.0);
    for (std::size_t series = 1; series <= n; ++series) {
        rng::Stream stream(config.seed, replication_index, series);
        double x = 0.0;
        for (std::size_t t = 0; t < kBurnIn + rows; ++t) {
            double eps = own * stream.normal(t);
            if (correlated) eps += shared * factor.normal(t);
            x = coeff * x + eps;
            if (t >= kBurnIn) out(t - kBurnIn, series - 1) = x;
        }
    }
    return out;
}

double fit_ar1(const double* series, std::size_t len) {
    if (len < 2) throw DimensionError("fit_ar1: need at least 2 observations");
    const double denom = kernels::sum_sq(series, len - 1);
    if (denom == 0.0) throw ValueError("fit_ar1: degenerate series, sum of squares is zero");
    return kernels::dot(series + 1, series, len - 1) / denom;
}

double fit_ar1(const std::vector<double>& series) { return fit_ar1(series.data(), series.size()); }

const MethodResult* SimResult::find(std::string_view name) const noexcept {
    for (const MethodResult& m : methods)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {

void run_one_replication(const SimConfig& config, const std::vector<Method>& methods,
                         const Matrix& summation, std::size_t rep, RepRecord& record) {
    const std::size_t n = config.bottom_dim;
    const std::size_t big_n = config.history_len;
    const std::size_t levels = 2 * n - 1;
    const std::size_t slots = levels + 1;

    Matrix bottom = simulate_var1(config, rep);
    if (config.transform == TransformKind::square) {
        double* d = bottom.data();
        const std::size_t total = bottom.rows() * bottom.cols();
        for (std::size_t i = 0; i < total; ++i) d[i] *= d[i];
    }

    // Hierarchy values by level (rows) over time (columns), y layout.
    Matrix by_level(levels, big_n + 1);
    std::vector<double> cum(n);
    for (std::size_t t = 0; t <= big_n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += bottom(t, j);
            cum[j] = acc;
        }
        for (std::size_t l = 0; l + 1 < n; ++l) by_level(l, t) = cum[n - 1 - l];  // a_n .. a_2
        for (std::size_t j = 0; j < n; ++j) by_level(n - 1 + j, t) = bottom(t, j);
    }

    // Per-level AR(1) fits on the first N observations, 1-step base forecast
    // and in-sample 1-step residuals from the same fit.
    std::vector<double> phi_hat(levels);
    for (std::size_t l = 0; l < levels; ++l) phi_hat[l] = fit_ar1(by_level.row(l), big_n);

    std::vector<double> forecast(levels);
    if (config.base_from_bottom) {
        std::vector<double> b_hat(n);
        for (std::size_t j = 0; j < n; ++j)
            b_hat[j] = phi_hat[n - 1 + j] * by_level(n - 1 + j, big_n - 1);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += b_hat[j];
            cum[j] = acc;
        }
        for (std::size_t l = 0; l + 1 < n; ++l) forecast[l] = cum[n - 1 - l];
        for (std::size_t j = 0; j < n; ++j) forecast[n - 1 + j] = b_hat[j];
    } else {
        for (std::size_t l = 0; l < levels; ++l)
            forecast[l] = phi_hat[l] * by_level(l, big_n - 1);
    }

    Matrix residuals(big_n - 1, levels);
    for (std::size_t t = 1; t < big_n; ++t)
        for (std::size_t l = 0; l < levels; ++l)
            residuals(t - 1, l) = by_level(l, t) - phi_hat[l] * by_level(l, t - 1);

    Matrix history(big_n, levels);
    for (std::size_t t = 0; t < big_n; ++t)
        for (std::size_t l = 0; l < levels; ++l) history(t, l) = by_level(l, t);

    const HierarchyVector y_hat(forecast, 1);

    // Outlier rule: |p_fo,1| > 50. A zero denominator inside the forecasted
    // proportions counts as an outlier too.
    record.outlier = false;
    try {
        const Proportions p = proportions_top_down(y_hat);
        record.outlier = std::abs(p.values[0]) > kOutlierLimit;
    } catch (const Error&) {
        record.outlier = true;
    }

    record.sums.assign((methods.size() + 1) * slots, 0.0);
    auto slot = [&](std::size_t method_idx) { return record.sums.data() + method_idx * slots; };

    // Slot 0: the base forecast itself.
    {
        double* s = slot(0);
        for (std::size_t l = 0; l < levels; ++l) {
            const double d = forecast[l] - by_level(l, big_n);
            s[0] += d * d;
            s[1 + l] = d * d;
        }
    }

    MethodContext ctx;
    ctx.level_history = &history;
    ctx.residuals = &residuals;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        double* s = slot(mi + 1);
        try {
            const MappingMatrix mapping = make_mapping(methods[mi], y_hat, summation, ctx);
            const ReconciledForecast rec = reconcile(mapping, summation, y_hat);
            if (!all_finite(rec.y_tilde)) throw ValueError("non-finite reconciled forecast");
            for (std::size_t l = 0; l < levels; ++l) {
                const double d = rec.y_tilde[l] - by_level(l, big_n);
                s[0] += d * d;
                s[1 + l] = d * d;
            }
            if (!std::isfinite(s[0])) throw ValueError("non-finite squared error");
        } catch (const Error&) {
            // failed or infinite results are excluded and counted
            for (std::size_t i = 0; i < slots; ++i)
                s[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
}

}  // namespace

SimResult run_experiment(const SimConfig& config) {
    validate(config);
    const std::vector<Method> methods = resolved_methods(config);
    const std::size_t n = config.bottom_dim;
    const std::size_t levels = 2 * n - 1;
    const std::size_t reps = config.replications;
    const Matrix summation = summation_matrix(n, 1);

    std::vector<RepRecord> records(reps);
    const std::size_t threads = resolve_threads(config);
    if (threads == 1) {
        for (std::size_t rep = 0; rep < reps; ++rep)
            run_one_replication(config, methods, summation, rep, records[rep]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t rep = w; rep < reps; rep += threads)
                    run_one_replication(config, methods, summation, rep, records[rep]);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    // Reduce in replication order; the result does not depend on the number
    // of worker threads.
    SimResult result;
    result.replications = reps;
    for (const RepRecord& r : records)
        if (r.outlier) ++result.outlier_count;

    const std::size_t slots = levels + 1;
    for (std::size_t mi = 0; mi <= methods.size(); ++mi) {
        MethodResult mr;
        mr.name = mi == 0 ? "base" : method_token(methods[mi - 1]);
        double total = 0.0;
        double total_filtered = 0.0;
        std::vector<double> per_level(levels, 0.0);
        std::size_t included = 0;
        std::size_t included_filtered = 0;
        for (const RepRecord& r : records) {
            const double* s = r.sums.data() + mi * slots;
            if (std::isnan(s[0])) continue;
            ++included;
            total += s[0];
            for (std::size_t l = 0; l < levels; ++l) per_level[l] += s[1 + l];
            if (!r.outlier) {
                ++included_filtered;
                total_filtered += s[0];
            }
        }
        mr.excluded = reps - included;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        mr.rmse = included == 0
                      ? nan
                      : std::sqrt(total / (static_cast<double>(included) * levels));
        mr.rmse_filtered =
            included_filtered == 0
                ? nan
                : std::sqrt(total_filtered / (static_cast<double>(included_filtered) * levels));
        mr.per_level_rmse.resize(levels);
        for (std::size_t l = 0; l < levels; ++l)
            mr.per_level_rmse[l] =
                included == 0 ? nan : std::sqrt(per_level[l] / static_cast<double>(included));
        result.methods.push_back(std::move(mr));
    }
    return result;
}

ErrorMetricValues error_metrics(const Matrix& actual, const Matrix& forecast) {
    if (actual.rows() != forecast.rows() || actual.cols() != forecast.cols())
        throw DimensionError("error_metrics: dimensions disagree");
    if (actual.rows() < 1 || actual.cols() < 1)
        throw DimensionError("error_metrics: empty input");
    const std::size_t days = actual.rows();
    const std::size_t hours = actual.cols();
    double abs_sum = 0.0;
    double rmse_sum = 0.0;
    for (std::size_t d = 0; d < days; ++d) {
        double sq = 0.0;
        for (std::size_t h = 0; h < hours; ++h) {
            const double diff = actual(d, h) - forecast(d, h);
            abs_sum += std::abs(diff);
            sq += diff * diff;
        }
        rmse_sum += std::sqrt(sq / static_cast<double>(hours));
    }
    return ErrorMetricValues{abs_sum / static_cast<double>(days * hours),
                             rmse_sum / static_cast<double>(days)};
}

}  // namespace curverec
