#pragma once

#include <cstddef>

// Dense numeric kernels. Each kernel comes in two flavours: a plain serial
// reference (`*_serial`) and an OpenMP-parallel version under the public
// name. Parallelism is only ever across independent output elements, so the
// per-element accumulation order is identical and both flavours produce
// bitwise-equal results; tests hold the pair to that.

namespace argmine::nn::kernels {

// y[m x n] = a[m x k] * b[k x n]        (+= when accumulate)
void gemm_nn_serial(const double* a, const double* b, double* y,
                    std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_nn(const double* a, const double* b, double* y,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);

// y[m x n] = a[m x k] * b[n x k]^T
void gemm_nt_serial(const double* a, const double* b, double* y,
                    std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_nt(const double* a, const double* b, double* y,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);

// y[m x n] = a[k x m]^T * b[k x n]
void gemm_tn_serial(const double* a, const double* b, double* y,
                    std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_tn(const double* a, const double* b, double* y,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);

// Elementwise y[i] = a[i] op b[i]; in-place aliasing with y == a is allowed.
void ew_add_serial(const double* a, const double* b, double* y, std::size_t n);
void ew_add(const double* a, const double* b, double* y, std::size_t n);
void ew_mul_serial(const double* a, const double* b, double* y, std::size_t n);
void ew_mul(const double* a, const double* b, double* y, std::size_t n);

void ew_sigmoid_serial(const double* a, double* y, std::size_t n);
void ew_sigmoid(const double* a, double* y, std::size_t n);
void ew_tanh_serial(const double* a, double* y, std::size_t n);
void ew_tanh(const double* a, double* y, std::size_t n);

// Row-wise stabilized softmax over an [m x n] matrix.
void softmax_rows_serial(const double* a, double* y, std::size_t m, std::size_t n);
void softmax_rows(const double* a, double* y, std::size_t m, std::size_t n);

// Work thresholds below which the parallel entry points stay serial.
std::size_t gemm_parallel_threshold();
std::size_t ew_parallel_threshold();

} // namespace argmine::nn::kernels
