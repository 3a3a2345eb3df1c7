#include "curverec/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "curverec/errors.hpp"

namespace curverec::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

const detail::Table kScalar{dot_scalar, sum_scalar, sum_sq_scalar, axpy_scalar, scale_scalar};

std::atomic<const detail::Table*> g_table{nullptr};
std::atomic<Isa> g_isa{Isa::scalar};

Isa pick_initial() {
    const char* env = std::getenv("CURVE_RECONCILE_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && detail::avx2_table().dot != nullptr &&
            detail::cpu_has_avx2())
            return Isa::avx2;
        if (std::strcmp(env, "avx2") == 0) return Isa::scalar;  // requested but unavailable
    }
    return best_supported();
}

const detail::Table& table_for(Isa isa) {
    return isa == Isa::avx2 ? detail::avx2_table() : detail::scalar_table();
}

const detail::Table& current() {
    const detail::Table* t = g_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        Isa isa = pick_initial();
        g_isa.store(isa, std::memory_order_relaxed);
        t = &table_for(isa);
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

}  // namespace

namespace detail {

const Table& scalar_table() noexcept { return kScalar; }

}  // namespace detail

Isa active() noexcept {
    current();
    return g_isa.load(std::memory_order_relaxed);
}

Isa best_supported() noexcept {
    if (detail::avx2_table().dot != nullptr && detail::cpu_has_avx2()) return Isa::avx2;
    return Isa::scalar;
}

void select(Isa isa) {
    if (isa == Isa::avx2 && (detail::avx2_table().dot == nullptr || !detail::cpu_has_avx2()))
        throw ValueError("avx2 kernels are not available on this CPU");
    g_isa.store(isa, std::memory_order_relaxed);
    g_table.store(&table_for(isa), std::memory_order_release);
}

const char* isa_name(Isa isa) noexcept {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

double dot(const double* x, const double* y, std::size_t n) noexcept {
    return current().dot(x, y, n);
}

double sum(const double* x, std::size_t n) noexcept { return current().sum(x, n); }

double sum_sq(const double* x, std::size_t n) noexcept { return current().sum_sq(x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) noexcept {
    current().axpy(a, x, y, n);
}

void scale(double a, double* x, std::size_t n) noexcept { current().scale(a, x, n); }

}  // namespace curverec::kernels
