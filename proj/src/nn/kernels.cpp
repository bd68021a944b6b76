#include "argmine/nn/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace argmine::nn::kernels {

std::size_t gemm_parallel_threshold() { return 1u << 15; } // m*k*n flops
std::size_t ew_parallel_threshold() { return 1u << 14; }

// ---------------------------------------------------------------------------
// gemm
// ---------------------------------------------------------------------------

void gemm_nn_serial(const double* a, const double* b, double* y,
                    std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        double* yi = y + i * n;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) yi[j] = 0.0;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) yi[j] += aip * bp[j];
        }
    }
}

void gemm_nn(const double* a, const double* b, double* y,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    if (m * k * n < gemm_parallel_threshold() || m < 2) {
        gemm_nn_serial(a, b, y, m, k, n, accumulate);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
        double* yi = y + i * n;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) yi[j] = 0.0;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) yi[j] += aip * bp[j];
        }
    }
}

void gemm_nt_serial(const double* a, const double* b, double* y,
                    std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* yi = y + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            yi[j] = accumulate ? yi[j] + acc : acc;
        }
    }
}

void gemm_nt(const double* a, const double* b, double* y,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    if (m * k * n < gemm_parallel_threshold() || m < 2) {
        gemm_nt_serial(a, b, y, m, k, n, accumulate);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
        const double* ai = a + i * k;
        double* yi = y + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            yi[j] = accumulate ? yi[j] + acc : acc;
        }
    }
}

void gemm_tn_serial(const double* a, const double* b, double* y,
                    std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        double* yi = y + i * n;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) yi[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double api = a[p * m + i];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) yi[j] += api * bp[j];
        }
    }
}

void gemm_tn(const double* a, const double* b, double* y,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    if (m * k * n < gemm_parallel_threshold() || m < 2) {
        gemm_tn_serial(a, b, y, m, k, n, accumulate);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
        double* yi = y + i * n;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) yi[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double api = a[p * m + i];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) yi[j] += api * bp[j];
        }
    }
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

void ew_add_serial(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

void ew_add(const double* a, const double* b, double* y, std::size_t n) {
    if (n < ew_parallel_threshold()) {
        ew_add_serial(a, b, y, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] = a[i] + b[i];
}

void ew_mul_serial(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void ew_mul(const double* a, const double* b, double* y, std::size_t n) {
    if (n < ew_parallel_threshold()) {
        ew_mul_serial(a, b, y, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] = a[i] * b[i];
}

void ew_sigmoid_serial(const double* a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-a[i]));
}

void ew_sigmoid(const double* a, double* y, std::size_t n) {
    if (n < ew_parallel_threshold()) {
        ew_sigmoid_serial(a, y, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        y[i] = 1.0 / (1.0 + std::exp(-a[i]));
}

void ew_tanh_serial(const double* a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(a[i]);
}

void ew_tanh(const double* a, double* y, std::size_t n) {
    if (n < ew_parallel_threshold()) {
        ew_tanh_serial(a, y, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] = std::tanh(a[i]);
}

// ---------------------------------------------------------------------------
// softmax
// ---------------------------------------------------------------------------

static inline void softmax_one_row(const double* a, double* y, std::size_t n) {
    double mx = a[0];
    for (std::size_t j = 1; j < n; ++j)
        if (a[j] > mx) mx = a[j];
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = std::exp(a[j] - mx);
        sum += y[j];
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < n; ++j) y[j] *= inv;
}

void softmax_rows_serial(const double* a, double* y, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) softmax_one_row(a + i * n, y + i * n, n);
}

void softmax_rows(const double* a, double* y, std::size_t m, std::size_t n) {
    if (m * n < ew_parallel_threshold() || m < 2) {
        softmax_rows_serial(a, y, m, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i)
        softmax_one_row(a + i * n, y + i * n, n);
}

} // namespace argmine::nn::kernels
