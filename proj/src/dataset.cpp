#include "harmonics/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace harmonics {

bool Dataset::uniform_grid() const {
    if (size() < 3) return true;
    const double step = (t.back() - t.front()) / static_cast<double>(size() - 1);
    for (int i = 1; i < size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step)))
            return false;
    return true;
}

Vec Dataset::input_row(int i) const {
    Vec row(static_cast<size_t>(input_dim()));
    row[0] = t[i];
    const double* src = y.row(i);
    std::copy(src, src + y.cols, row.begin() + 1);
    return row;
}

Mat Dataset::inputs() const {
    Mat m(size(), input_dim());
    for (int i = 0; i < size(); ++i) m.set_row(i, input_row(i));
    return m;
}

Vec Dataset::row_for(int i, int width) const {
    if (width == input_dim()) return input_row(i);
    require(width == dim(), "dataset: row width matches neither [t, y] nor y");
    const double* src = y.row(i);
    return Vec(src, src + y.cols);
}

Mat Dataset::rows_for(int width) const {
    Mat m(size(), width);
    for (int i = 0; i < size(); ++i) m.set_row(i, row_for(i, width));
    return m;
}

std::string Dataset::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "t";
    for (int j = 0; j < dim(); ++j) os << ",y_" << j;
    os << "\n";
    for (int i = 0; i < size(); ++i) {
        os << t[i];
        for (int j = 0; j < dim(); ++j) os << "," << y(i, j);
        os << "\n";
    }
    return os.str();
}

Dataset Dataset::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "dataset csv: empty file");
    int d = 0;
    for (char c : line)
        if (c == ',') ++d;
    require(d >= 1, "dataset csv: need t plus at least one y column");
    Dataset ds;
    std::vector<Vec> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        Vec row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        require(static_cast<int>(row.size()) == d + 1, "dataset csv: ragged row");
        ds.t.push_back(row[0]);
        rows.push_back(Vec(row.begin() + 1, row.end()));
    }
    ds.y = Mat(static_cast<int>(rows.size()), d);
    for (size_t i = 0; i < rows.size(); ++i) ds.y.set_row(static_cast<int>(i), rows[i]);
    return ds;
}

void Dataset::save(const std::string& path) const {
    std::ofstream f(path);
    require(f.good(), "dataset: cannot write " + path);
    f << to_csv();
}

Dataset Dataset::load(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "dataset: cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return from_csv(os.str());
}

namespace {

double sinc_fn(double u, bool normalized) {
    const double v = normalized ? M_PI * u : u;
    if (v == 0.0) return 1.0;
    return std::sin(v) / v;
}

Vec grid(int size) {
    require(size >= 2, "dataset: size must be >= 2");
    Vec t(size);
    for (int i = 0; i < size; ++i)
        t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(size - 1);
    return t;
}

} // namespace

Dataset gen_sinc(int size, bool normalized) {
    Dataset ds;
    ds.t = grid(size);
    ds.y = Mat(size, 1);
    for (int i = 0; i < size; ++i) ds.y(i, 0) = sinc_fn(5.0 * ds.t[i], normalized);
    return ds;
}

Dataset gen_multisine(int size) {
    static const double rates[] = {0.5, 1.0, 2.0, 3.0, 5.0};
    Dataset ds;
    ds.t = grid(size);
    ds.y = Mat(size, 5);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < 5; ++j) ds.y(i, j) = std::sin(2.0 * M_PI * rates[j] * ds.t[i]);
    return ds;
}

Dataset gen_dataset(const std::string& kind, int size, bool sinc_normalized) {
    if (kind == "sinc") return gen_sinc(size, sinc_normalized);
    if (kind == "multisine") return gen_multisine(size);
    throw std::invalid_argument("unknown dataset kind: " + kind);
}

} // namespace harmonics
