#pragma once

#include <string>

#include "harmonics/core.hpp"

namespace harmonics {

/// A scalar ordering coordinate t plus per-point targets y (rows follow t).
struct Dataset {
    Vec t;
    Mat y; // size() x d

    int size() const { return static_cast<int>(t.size()); }
    int dim() const { return y.cols; }

    /// Pair row [t_i, y_i0, ..., y_{i,d-1}]: the coordinate joined with the
    /// targets. Models trained on pair rows reconstruct a curve over t;
    /// models trained on bare target rows see the signal values alone.
    Vec input_row(int i) const;
    Mat inputs() const; // size() x (1 + d), rows as above
    int input_dim() const { return 1 + y.cols; }

    /// Row of the given width: input_dim() selects the pair row, dim() the
    /// bare target row. Any other width is an error.
    Vec row_for(int i, int width) const;
    Mat rows_for(int width) const;

    /// True when t is equispaced to 1e-9 of the mean step.
    bool uniform_grid() const;

    /// CSV with header t,y_0,...,y_{d-1}, 12 significant digits.
    std::string to_csv() const;
    static Dataset from_csv(const std::string& text);

    void save(const std::string& path) const;
    static Dataset load(const std::string& path);
};

/// sinc dataset: (t, sinc(5t)) with t equispaced on [-1, 1]. The normalized
/// convention sinc(u) = sin(pi u)/(pi u) is the default; `normalized = false`
/// selects sin(u)/u.
Dataset gen_sinc(int size, bool normalized = true);

/// multisine dataset: (t, [sin(2 pi r t)] for r in {0.5, 1, 2, 3, 5}).
Dataset gen_multisine(int size);

/// Dispatch by kind in {"sinc", "multisine"}. The seed is recorded plumbing
/// only; both generators are deterministic grids.
Dataset gen_dataset(const std::string& kind, int size, bool sinc_normalized = true);

} // namespace harmonics
