#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "harmonics/core.hpp"

namespace harmonics {

/// Tuple of non-negative degrees indexing a tensorised Hermite basis function.
struct MultiIndex {
    std::vector<int> degrees;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> d) : degrees(std::move(d)) {
        for (int k : degrees) require(k >= 0, "MultiIndex: negative degree");
    }

    int dim() const { return static_cast<int>(degrees.size()); }

    int total_degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }

    /// Exact alpha! as a 64-bit integer. Total degree above 20 is rejected:
    /// 20! is the largest single factorial below 2^63 and mixed products are
    /// bounded by the same limit, so results here never overflow or round.
    uint64_t factorial() const {
        require(total_degree() <= 20, "MultiIndex: factorial only exact up to total degree 20");
        uint64_t f = 1;
        for (int k : degrees)
            for (int j = 2; j <= k; ++j) f *= static_cast<uint64_t>(j);
        return f;
    }

    bool operator==(const MultiIndex& o) const { return degrees == o.degrees; }

    /// Graded lexicographic: first by total degree, then lexicographically.
    bool operator<(const MultiIndex& o) const {
        const int a = total_degree(), b = o.total_degree();
        if (a != b) return a < b;
        return degrees < o.degrees;
    }

    std::string to_string(char sep = ';') const {
        std::string s;
        for (size_t i = 0; i < degrees.size(); ++i) {
            if (i) s += sep;
            s += std::to_string(degrees[i]);
        }
        return s;
    }
};

/// All alpha in N^n with |alpha| <= max_total_degree, graded-lex order.
/// Truncation by total degree is then a prefix of this list.
inline std::vector<MultiIndex> enumerate_multi_indices(int n, int max_total_degree) {
    require(n >= 1, "enumerate_multi_indices: n >= 1 required");
    require(max_total_degree >= 0, "enumerate_multi_indices: max_total_degree >= 0 required");
    std::vector<MultiIndex> out;
    std::vector<int> cur(n, 0);
    // Enumerate compositions of d into n parts, lexicographically per degree.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n - 1) {
            cur[pos] = remaining;
            out.emplace_back(cur);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            cur[pos] = k;
            self(self, pos + 1, remaining - k);
        }
    };
    for (int d = 0; d <= max_total_degree; ++d) rec(rec, 0, d);
    return out;
}

} // namespace harmonics
