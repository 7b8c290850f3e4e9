#include "resest/subsets.hpp"

#include "resest/errors.hpp"

#include <limits>

namespace resest {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        const auto num = static_cast<std::uint64_t>(n - k + i);
        if (result > std::numeric_limits<std::uint64_t>::max() / num) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result = result * num / static_cast<std::uint64_t>(i);
    }
    return result;
}

void require_enumerable(std::uint64_t count, const std::string& what) {
    if (count > kEnumerationLimit) {
        throw TooLarge(what + ": " + std::to_string(count) + " subsets exceed the enumeration limit of " +
                       std::to_string(kEnumerationLimit));
    }
}

IndexSet complement(const IndexSet& set, int n) {
    IndexSet out;
    out.reserve(static_cast<std::size_t>(n) - set.size());
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        if (j < set.size() && set[j] == i) {
            ++j;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

Matrix select_rows(const Matrix& a, const IndexSet& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
    }
    return out;
}

Matrix select_cols(const Matrix& a, const IndexSet& cols) {
    Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    }
    return out;
}

}  // namespace resest
