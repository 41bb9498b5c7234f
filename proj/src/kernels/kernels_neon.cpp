#include <arm_neon.h>

#include <algorithm>

#include "cwlab/kernels.hpp"

namespace cwlab::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_neon(const double* w, const double* bias, const double* x, double* y,
               std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_neon(w + r * cols, x, cols);
}

void gemv_t_neon(const double* w, const double* v, double* y, std::size_t rows,
                 std::size_t cols) {
    std::fill(y, y + cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double vr = v[r];
        if (vr == 0.0) continue;
        const double* row = w + r * cols;
        const float64x2_t vb = vdupq_n_f64(vr);
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            vst1q_f64(y + c, vfmaq_f64(vld1q_f64(y + c), vld1q_f64(row + c), vb));
        }
        for (; c < cols; ++c) y[c] += row[c] * vr;
    }
}

void step_clamp_neon(double* x, const double* g, double step, std::size_t n) {
    const float64x2_t s = vdupq_n_f64(step);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vsubq_f64(vld1q_f64(x + i), vmulq_f64(s, vld1q_f64(g + i)));
        vst1q_f64(x + i, vminq_f64(vmaxq_f64(v, zero), one));
    }
    for (; i < n; ++i) x[i] = std::clamp(x[i] - step * g[i], 0.0, 1.0);
}

}  // namespace

const KernelTable& neon_table() noexcept {
    static const KernelTable table{"neon", &dot_neon, &gemv_neon, &gemv_t_neon,
                                   &step_clamp_neon};
    return table;
}

}  // namespace cwlab::kernels::detail
