#include <doctest.h>

#include "harmonics/kernels.hpp"
#include "harmonics/rng.hpp"

using namespace harmonics;
using kernels::cplx;

namespace {

Mat random_mat(int r, int c, Rng& rng) {
    Mat m(r, c);
    for (double& v : m.a) v = rng.gauss();
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    REQUIRE(a.rows == b.rows);
    REQUIRE(a.cols == b.cols);
    double d = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i) d = std::max(d, std::abs(a.a[i] - b.a[i]));
    return d;
}

} // namespace

TEST_CASE("matmul matches a hand example") {
    Mat a(2, 3), b(3, 2);
    a.a = {1, 2, 3, 4, 5, 6};
    b.a = {7, 8, 9, 10, 11, 12};
    const Mat c = kernels::matmul(a, b);
    CHECK(c.rows == 2);
    CHECK(c.cols == 2);
    CHECK(c(0, 0) == doctest::Approx(58).epsilon(1e-15));
    CHECK(c(0, 1) == doctest::Approx(64).epsilon(1e-15));
    CHECK(c(1, 0) == doctest::Approx(139).epsilon(1e-15));
    CHECK(c(1, 1) == doctest::Approx(154).epsilon(1e-15));
}

TEST_CASE("parallel and serial kernels agree") {
    Rng rng(42);
    const Mat a = random_mat(33, 17, rng);
    const Mat b = random_mat(17, 29, rng);
    CHECK(max_abs_diff(kernels::matmul(a, b), kernels::serial::matmul(a, b)) <= 1e-12);

    const Mat at = random_mat(17, 33, rng); // (k x r)
    CHECK(max_abs_diff(kernels::matmul_tn(at, b), kernels::serial::matmul_tn(at, b)) <= 1e-12);

    const Mat bt = random_mat(29, 17, rng); // (c x k)
    CHECK(max_abs_diff(kernels::matmul_nt(a, bt), kernels::serial::matmul_nt(a, bt)) <= 1e-12);
}

TEST_CASE("matmul_tn and matmul_nt match explicit transposes") {
    Rng rng(7);
    const Mat a = random_mat(12, 9, rng);
    const Mat b = random_mat(12, 5, rng);
    Mat a_t(9, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 9; ++j) a_t(j, i) = a(i, j);
    CHECK(max_abs_diff(kernels::matmul_tn(a, b), kernels::matmul(a_t, b)) <= 1e-12);

    const Mat c = random_mat(5, 9, rng);
    Mat c_t(9, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 9; ++j) c_t(j, i) = c(i, j);
    CHECK(max_abs_diff(kernels::matmul_nt(a, c), kernels::matmul(a, c_t)) <= 1e-12);
}

TEST_CASE("dft_direct of a constant concentrates in bin 0") {
    const Vec y(16, 3.0);
    const auto x = kernels::dft_direct(y);
    CHECK(std::abs(x[0] - cplx(48.0, 0.0)) <= 1e-12);
    for (size_t k = 1; k < x.size(); ++k) CHECK(std::abs(x[k]) <= 1e-12);
}

TEST_CASE("nudft is linear") {
    Rng rng(3);
    const int n = 40;
    Vec t(n), y1(n), y2(n), sum(n);
    for (int i = 0; i < n; ++i) {
        t[i] = rng.uniform(-1.0, 1.0);
        y1[i] = rng.gauss();
        y2[i] = rng.gauss();
        sum[i] = y1[i] + y2[i];
    }
    Vec omega = {0.0, 1.0, 2.5, 7.0, 13.3};
    const auto a = kernels::nudft(t, y1, omega);
    const auto b = kernels::nudft(t, y2, omega);
    const auto c = kernels::nudft(t, sum, omega);
    for (size_t k = 0; k < omega.size(); ++k) CHECK(std::abs(c[k] - (a[k] + b[k])) <= 1e-12);
}

TEST_CASE("nudft of a complex tone peaks at the nearest grid frequency") {
    // y_j = cos(w0 t_j): |X| should be maximal at the grid point closest to w0
    const int n = 64;
    const double w0 = 9.0;
    Vec t(n), y(n), omega;
    for (int i = 0; i < n; ++i) {
        t[i] = -1.0 + 2.0 * i / (n - 1);
        y[i] = std::cos(w0 * t[i]);
    }
    for (int k = 0; k < 20; ++k) omega.push_back(k);
    const auto x = kernels::nudft(t, y, omega);
    size_t best = 0;
    for (size_t k = 1; k < x.size(); ++k)
        if (std::abs(x[k]) > std::abs(x[best])) best = k;
    CHECK(omega[best] == doctest::Approx(w0).epsilon(1e-12));
}
