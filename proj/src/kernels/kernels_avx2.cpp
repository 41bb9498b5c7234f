// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>

#include "cwlab/kernels.hpp"

namespace cwlab::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_avx2(const double* w, const double* bias, const double* x, double* y,
               std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_avx2(w + r * cols, x, cols);
}

void gemv_t_avx2(const double* w, const double* v, double* y, std::size_t rows,
                 std::size_t cols) {
    std::fill(y, y + cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double vr = v[r];
        if (vr == 0.0) continue;
        const double* row = w + r * cols;
        const __m256d vb = _mm256_set1_pd(vr);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d acc = _mm256_loadu_pd(y + c);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), vb, acc);
            _mm256_storeu_pd(y + c, acc);
        }
        for (; c < cols; ++c) y[c] += row[c] * vr;
    }
}

void step_clamp_avx2(double* x, const double* g, double step, std::size_t n) {
    const __m256d s = _mm256_set1_pd(step);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // x - s*g, rounded like the scalar path (no fused negate-multiply-add)
        __m256d prod = _mm256_mul_pd(s, _mm256_loadu_pd(g + i));
        __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x + i), prod);
        v = _mm256_min_pd(_mm256_max_pd(v, zero), one);
        _mm256_storeu_pd(x + i, v);
    }
    for (; i < n; ++i) x[i] = std::clamp(x[i] - step * g[i], 0.0, 1.0);
}

}  // namespace

const KernelTable& avx2_table() noexcept {
    static const KernelTable table{"avx2", &dot_avx2, &gemv_avx2, &gemv_t_avx2,
                                   &step_clamp_avx2};
    return table;
}

}  // namespace cwlab::kernels::detail
