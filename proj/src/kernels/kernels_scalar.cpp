#include "cwlab/kernels.hpp"

#include <algorithm>

namespace cwlab::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_scalar(const double* w, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = bias[r] + dot_scalar(w + r * cols, x, cols);
    }
}

void gemv_t_scalar(const double* w, const double* v, double* y, std::size_t rows,
                   std::size_t cols) {
    std::fill(y, y + cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double vr = v[r];
        if (vr == 0.0) continue;
        const double* row = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * vr;
    }
}

void step_clamp_scalar(double* x, const double* g, double step, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i] - step * g[i], 0.0, 1.0);
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{"scalar", &dot_scalar, &gemv_scalar, &gemv_t_scalar,
                                   &step_clamp_scalar};
    return table;
}

}  // namespace cwlab::kernels
