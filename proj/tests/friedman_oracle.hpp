#pragma once

#include <vector>

#include "idf/stats.hpp"

// Exact Friedman null for k = 3: enumerate all (k!)^N equally likely rank
// matrices and count those at or above the observed tie-corrected statistic.
// Test-only oracle, deliberately independent of the implementation path.
inline double friedman_permutation_p(const std::vector<std::vector<double>>& table) {
    const int n = static_cast<int>(table.size());
    double obs = idf::stats::friedman_test(table).chi_square;
    static const int perms[6][3] = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3},
                                    {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 6;
    long count = 0;
    std::vector<std::vector<double>> t(static_cast<size_t>(n), std::vector<double>(3));
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < n; ++i) {
            const int* p = perms[c % 6];
            c /= 6;
            for (int j = 0; j < 3; ++j) t[static_cast<size_t>(i)][static_cast<size_t>(j)] = p[j];
        }
        if (idf::stats::friedman_test(t).chi_square >= obs - 1e-12) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
}
