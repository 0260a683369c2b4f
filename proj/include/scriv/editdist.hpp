// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace scriv {

// Unit-cost Levenshtein distance (Wagner-Fischer, two rows).
template <typename T>
int64_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
    const size_t n = a.size(), m = b.size();
    if (n == 0) return static_cast<int64_t>(m);
    if (m == 0) return static_cast<int64_t>(n);
    std::vector<int64_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int64_t>(i);
        for (size_t j = 1; j <= m; ++j) {
            const int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

enum class EditOp : uint8_t { match, substitute, insert_b, delete_a };

// Full DP with backtrace; returns the edit script aligning a onto b.
template <typename T>
std::vector<EditOp> edit_script(const std::vector<T>& a, const std::vector<T>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<int64_t> dp((n + 1) * (m + 1));
    auto at = [&](size_t i, size_t j) -> int64_t& { return dp[i * (m + 1) + j]; };
    for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int64_t>(i);
    for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int64_t>(j);
    for (size_t i = 1; i <= n; ++i)
        for (size_t j = 1; j <= m; ++j) {
            const int64_t sub = at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
            at(i, j) = std::min({at(i - 1, j) + 1, at(i, j - 1) + 1, sub});
        }
    std::vector<EditOp> script;
    size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)) {
            script.push_back(a[i - 1] == b[j - 1] ? EditOp::match : EditOp::substitute);
            --i;
            --j;
        } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            script.push_back(EditOp::delete_a);
            --i;
        } else {
            script.push_back(EditOp::insert_b);
            --j;
        }
    }
    std::reverse(script.begin(), script.end());
    return script;
}

}  // namespace scriv
