#pragma once

#include "resest/types.hpp"

#include <cstdint>
#include <string>

namespace resest {

/// Largest subset count any exhaustive routine will walk.
inline constexpr std::uint64_t kEnumerationLimit = 1'000'000;

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Throws TooLarge when `count` exceeds kEnumerationLimit.
void require_enumerable(std::uint64_t count, const std::string& what);

/// Calls f(subset) for every k-subset of {0..n-1} in lexicographic order.
/// Stops early when f returns false.
template <typename F>
void for_each_combination(int n, int k, F&& f) {
    if (k < 0 || k > n) {
        return;
    }
    IndexSet idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        idx[static_cast<std::size_t>(i)] = i;
    }
    while (true) {
        if (!f(static_cast<const IndexSet&>(idx))) {
            return;
        }
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) {
            --i;
        }
        if (i < 0) {
            return;
        }
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

/// Complement of a sorted index set within {0..n-1}.
IndexSet complement(const IndexSet& set, int n);

Matrix select_rows(const Matrix& a, const IndexSet& rows);
Matrix select_cols(const Matrix& a, const IndexSet& cols);

}  // namespace resest
