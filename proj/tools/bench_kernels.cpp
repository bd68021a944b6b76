// Compares the serial reference kernels against the OpenMP versions and
// reports timings and speedups. The two must agree bitwise; this harness
// spot-checks that while it measures.

#include "argmine/nn/kernels.hpp"
#include "argmine/nn/rng.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace argmine::nn;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warmup
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

std::vector<double> random_vec(std::size_t n, SeededRng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

void bench_gemm(std::size_t n, int reps, SeededRng& rng) {
    auto a = random_vec(n * n, rng);
    auto b = random_vec(n * n, rng);
    std::vector<double> y_serial(n * n), y_omp(n * n);

    const double serial_ms =
        time_ms([&] { kernels::gemm_nn_serial(a.data(), b.data(), y_serial.data(), n, n, n); },
                reps);
    const double omp_ms =
        time_ms([&] { kernels::gemm_nn(a.data(), b.data(), y_omp.data(), n, n, n); }, reps);

    const bool equal = std::memcmp(y_serial.data(), y_omp.data(), n * n * sizeof(double)) == 0;
    std::printf("gemm_nn   %4zux%-4zu  serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n",
                n, n, serial_ms, omp_ms, serial_ms / omp_ms,
                equal ? "bitwise-equal" : "MISMATCH");
}

void bench_softmax(std::size_t rows, std::size_t cols, int reps, SeededRng& rng) {
    auto a = random_vec(rows * cols, rng);
    std::vector<double> y_serial(rows * cols), y_omp(rows * cols);

    const double serial_ms = time_ms(
        [&] { kernels::softmax_rows_serial(a.data(), y_serial.data(), rows, cols); }, reps);
    const double omp_ms =
        time_ms([&] { kernels::softmax_rows(a.data(), y_omp.data(), rows, cols); }, reps);

    const bool equal =
        std::memcmp(y_serial.data(), y_omp.data(), rows * cols * sizeof(double)) == 0;
    std::printf("softmax  %5zux%-4zu  serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n",
                rows, cols, serial_ms, omp_ms, serial_ms / omp_ms,
                equal ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--quick") quick = true;

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run the serial path\n");
#endif

    SeededRng rng(42);
    if (quick) {
        bench_gemm(96, 3, rng);
        bench_softmax(2048, 64, 5, rng);
        return 0;
    }
    for (std::size_t n : {64, 128, 256, 384, 512}) bench_gemm(n, n >= 384 ? 2 : 5, rng);
    for (std::size_t rows : {1024, 8192, 65536}) bench_softmax(rows, 64, 5, rng);
    return 0;
}
