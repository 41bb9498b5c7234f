#pragma once

// Dense inner-loop kernels used by the network and the attack iteration.
//
// Every kernel has a portable scalar reference implementation. Vectorized
// variants (AVX2+FMA on x86-64, NEON on AArch64) are compiled in separate
// translation units and selected once at runtime. The environment variable
// CWLAB_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cwlab::kernels {

/// Function table for one instruction-set variant.
struct KernelTable {
    std::string_view name;

    double (*dot)(const double* a, const double* b, std::size_t n);

    /// y[r] = bias[r] + sum_c w[r*cols + c] * x[c]   (row-major w)
    void (*gemv)(const double* w, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols);

    /// y[c] = sum_r w[r*cols + c] * v[r]   (transpose product, y overwritten)
    void (*gemv_t)(const double* w, const double* v, double* y, std::size_t rows,
                   std::size_t cols);

    /// x[i] = clamp(x[i] - step * g[i], 0, 1)
    void (*step_clamp)(double* x, const double* g, double step, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Best table the host CPU supports (cached after first call).
const KernelTable& active() noexcept;

/// Table for the named variant if it was compiled in and the CPU supports it.
const KernelTable* find(std::string_view name) noexcept;

// Convenience wrappers over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

inline void step_clamp(std::span<double> x, std::span<const double> g, double step) noexcept {
    active().step_clamp(x.data(), g.data(), step, x.size());
}

namespace detail {
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(__aarch64__)
const KernelTable& neon_table() noexcept;
#endif
}  // namespace detail

}  // namespace cwlab::kernels
