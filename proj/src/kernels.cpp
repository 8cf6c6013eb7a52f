#include "harmonics/kernels.hpp"

#include <cmath>

namespace harmonics::kernels {

namespace {

void check_mm(int ak, int bk, const char* what) {
    require(ak == bk, std::string("matmul: inner dimension mismatch in ") + what);
}

// i-k-j loop order keeps the inner loop contiguous in both B and C.
void mm_row(const Mat& A, const Mat& B, Mat& C, int i) {
    const double* arow = A.row(i);
    double* crow = C.row(i);
    for (int k = 0; k < A.cols; ++k) {
        const double aik = arow[k];
        const double* brow = B.row(k);
        for (int j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
    }
}

void mm_nt_row(const Mat& A, const Mat& B, Mat& C, int i) {
    const double* arow = A.row(i);
    double* crow = C.row(i);
    for (int j = 0; j < B.rows; ++j) {
        const double* brow = B.row(j);
        double s = 0.0;
        // simd reduction: lets the dot product vectorize without -ffast-math
#pragma omp simd reduction(+ : s)
        for (int k = 0; k < A.cols; ++k) s += arow[k] * brow[k];
        crow[j] = s;
    }
}

// Row i of A^T B accumulates column i of A against all rows of B.
void mm_tn_row(const Mat& A, const Mat& B, Mat& C, int i) {
    double* crow = C.row(i);
    for (int k = 0; k < A.rows; ++k) {
        const double aki = A(k, i);
        const double* brow = B.row(k);
        for (int j = 0; j < B.cols; ++j) crow[j] += aki * brow[j];
    }
}

cplx nudft_one(const Vec& t, const Vec& y, double w) {
    double re = 0.0, im = 0.0;
    for (size_t j = 0; j < t.size(); ++j) {
        const double ph = -w * t[j];
        re += y[j] * std::cos(ph);
        im += y[j] * std::sin(ph);
    }
    return {re, im};
}

cplx dft_bin(const Vec& y, int k) {
    const size_t n = y.size();
    const double step = -2.0 * M_PI * k / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const double ph = step * static_cast<double>(j);
        re += y[j] * std::cos(ph);
        im += y[j] * std::sin(ph);
    }
    return {re, im};
}

} // namespace

namespace serial {

Mat matmul(const Mat& A, const Mat& B) {
    check_mm(A.cols, B.rows, "matmul");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) mm_row(A, B, C, i);
    return C;
}

Mat matmul_tn(const Mat& A, const Mat& B) {
    check_mm(A.rows, B.rows, "matmul_tn");
    Mat C(A.cols, B.cols);
    for (int i = 0; i < A.cols; ++i) mm_tn_row(A, B, C, i);
    return C;
}

Mat matmul_nt(const Mat& A, const Mat& B) {
    check_mm(A.cols, B.cols, "matmul_nt");
    Mat C(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i) mm_nt_row(A, B, C, i);
    return C;
}

std::vector<cplx> nudft(const Vec& t, const Vec& y, const Vec& omega) {
    require(t.size() == y.size(), "nudft: len(t) != len(y)");
    std::vector<cplx> out(omega.size());
    for (size_t m = 0; m < omega.size(); ++m) out[m] = nudft_one(t, y, omega[m]);
    return out;
}

std::vector<cplx> dft_direct(const Vec& y) {
    require(!y.empty(), "dft: empty input");
    std::vector<cplx> out(y.size());
    for (size_t k = 0; k < y.size(); ++k) out[k] = dft_bin(y, static_cast<int>(k));
    return out;
}

} // namespace serial

Mat matmul(const Mat& A, const Mat& B) {
    check_mm(A.cols, B.rows, "matmul");
    Mat C(A.rows, B.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; ++i) mm_row(A, B, C, i);
    return C;
}

Mat matmul_tn(const Mat& A, const Mat& B) {
    check_mm(A.rows, B.rows, "matmul_tn");
    Mat C(A.cols, B.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.cols; ++i) mm_tn_row(A, B, C, i);
    return C;
}

Mat matmul_nt(const Mat& A, const Mat& B) {
    check_mm(A.cols, B.cols, "matmul_nt");
    Mat C(A.rows, B.rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; ++i) mm_nt_row(A, B, C, i);
    return C;
}

std::vector<cplx> nudft(const Vec& t, const Vec& y, const Vec& omega) {
    require(t.size() == y.size(), "nudft: len(t) != len(y)");
    std::vector<cplx> out(omega.size());
    const int m_count = static_cast<int>(omega.size());
#pragma omp parallel for schedule(static)
    for (int m = 0; m < m_count; ++m) out[m] = nudft_one(t, y, omega[m]);
    return out;
}

std::vector<cplx> dft_direct(const Vec& y) {
    require(!y.empty(), "dft: empty input");
    std::vector<cplx> out(y.size());
    const int n = static_cast<int>(y.size());
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) out[k] = dft_bin(y, k);
    return out;
}

} // namespace harmonics::kernels
