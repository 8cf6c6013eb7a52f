#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmonics {

using Vec = std::vector<double>;

/// Dense row-major matrix.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
    const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }

    Vec row_vec(int i) const { return Vec(row(i), row(i) + cols); }
    void set_row(int i, const Vec& v) {
        if (static_cast<int>(v.size()) != cols) throw std::invalid_argument("Mat::set_row: size mismatch");
        std::copy(v.begin(), v.end(), row(i));
    }
};

inline Mat as_row(const Vec& v) {
    Mat m(1, static_cast<int>(v.size()));
    m.a = v;
    return m;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace harmonics
