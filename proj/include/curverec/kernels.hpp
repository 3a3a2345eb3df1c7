#pragma once

#include <cstddef>

// Arithmetic kernels behind the dense linear algebra. Every kernel has a
// plain scalar reference implementation and (on x86-64) an AVX2+FMA variant.
// The active variant is chosen at runtime: CPU detection by default, or the
// CURVE_RECONCILE_SIMD environment variable ("scalar", "avx2", "auto").
// Scalar and SIMD variants are equivalence-tested against each other; they
// may differ by accumulation order, so results agree to rounding, not bits.

namespace curverec::kernels {

enum class Isa { scalar, avx2 };

// Variant currently in use.
Isa active() noexcept;

// Best variant this CPU supports.
Isa best_supported() noexcept;

// Force a variant (used by the equivalence tests). Throws ValueError if the
// CPU cannot run it.
void select(Isa isa);

const char* isa_name(Isa isa) noexcept;

double dot(const double* x, const double* y, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double sum_sq(const double* x, std::size_t n) noexcept;
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;

namespace detail {
struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
};
const Table& scalar_table() noexcept;
const Table& avx2_table() noexcept;  // null entries when unsupported at build time
bool cpu_has_avx2() noexcept;
}  // namespace detail

}  // namespace curverec::kernels
