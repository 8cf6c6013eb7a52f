#pragma once

// Data-parallel inner loops used throughout the library. Each kernel has an
// OpenMP-parallel implementation (default) and a plain serial reference in
// kernels::serial. The two must agree bit-for-bit where no cross-iteration
// reduction exists and to ~1e-12 otherwise; tests and benchmarks/bench_kernels
// compare them.

#include <complex>

#include "harmonics/core.hpp"

namespace harmonics::kernels {

using cplx = std::complex<double>;

namespace serial {

/// C = A * B, (r x k) * (k x c).
Mat matmul(const Mat& A, const Mat& B);

/// C = A^T * B, A is (k x r), B is (k x c).
Mat matmul_tn(const Mat& A, const Mat& B);

/// C = A * B^T, A is (r x k), B is (c x k).
Mat matmul_nt(const Mat& A, const Mat& B);

/// X(omega_m) = sum_j y_j exp(-i omega_m t_j), direct summation.
std::vector<cplx> nudft(const Vec& t, const Vec& y, const Vec& omega);

/// Naive O(N^2) DFT, X_k = sum_j y_j exp(-2 pi i j k / N).
std::vector<cplx> dft_direct(const Vec& y);

} // namespace serial

Mat matmul(const Mat& A, const Mat& B);
Mat matmul_tn(const Mat& A, const Mat& B);
Mat matmul_nt(const Mat& A, const Mat& B);
std::vector<cplx> nudft(const Vec& t, const Vec& y, const Vec& omega);
std::vector<cplx> dft_direct(const Vec& y);

} // namespace harmonics::kernels
