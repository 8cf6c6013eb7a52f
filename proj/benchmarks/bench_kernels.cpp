// Timing comparison: OpenMP kernels vs the serial reference implementations.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "harmonics/kernels.hpp"
#include "harmonics/rng.hpp"

using namespace harmonics;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

Mat random_mat(int r, int c, Rng& rng) {
    Mat m(r, c);
    for (double& v : m.a) v = rng.gauss();
    return m;
}

void report(const char* name, double serial_ms, double parallel_ms, double max_abs_diff) {
    std::printf("%-14s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx   max|diff| %.3g\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, max_abs_diff);
}

double mat_diff(const Mat& a, const Mat& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i) d = std::max(d, std::abs(a.a[i] - b.a[i]));
    return d;
}

} // namespace

int main() {
    Rng rng(42);
    const int n = 256;
    const Mat A = random_mat(n, n, rng);
    const Mat B = random_mat(n, n, rng);

    {
        Mat cs, cp;
        const double ts = time_ms([&] { cs = kernels::serial::matmul(A, B); }, 5);
        const double tp = time_ms([&] { cp = kernels::matmul(A, B); }, 5);
        report("matmul", ts, tp, mat_diff(cs, cp));
    }
    {
        Mat cs, cp;
        const double ts = time_ms([&] { cs = kernels::serial::matmul_tn(A, B); }, 5);
        const double tp = time_ms([&] { cp = kernels::matmul_tn(A, B); }, 5);
        report("matmul_tn", ts, tp, mat_diff(cs, cp));
    }
    {
        Mat cs, cp;
        const double ts = time_ms([&] { cs = kernels::serial::matmul_nt(A, B); }, 5);
        const double tp = time_ms([&] { cp = kernels::matmul_nt(A, B); }, 5);
        report("matmul_nt", ts, tp, mat_diff(cs, cp));
    }

    const int N = 4096;
    Vec t(N), y(N), omega(N);
    for (int i = 0; i < N; ++i) {
        t[i] = -1.0 + 2.0 * i / (N - 1);
        y[i] = std::sin(8.0 * t[i]) + 0.3 * rng.gauss();
        omega[i] = M_PI * (i - N / 2);
    }
    {
        std::vector<kernels::cplx> xs, xp;
        const double ts = time_ms([&] { xs = kernels::serial::nudft(t, y, omega); }, 3);
        const double tp = time_ms([&] { xp = kernels::nudft(t, y, omega); }, 3);
        double d = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) d = std::max(d, std::abs(xs[i] - xp[i]));
        report("nudft", ts, tp, d);
    }
    {
        std::vector<kernels::cplx> xs, xp;
        const double ts = time_ms([&] { xs = kernels::serial::dft_direct(y); }, 3);
        const double tp = time_ms([&] { xp = kernels::dft_direct(y); }, 3);
        double d = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) d = std::max(d, std::abs(xs[i] - xp[i]));
        report("dft_direct", ts, tp, d);
    }
    return 0;
}
