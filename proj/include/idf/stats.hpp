#pragma once

#include <vector>

namespace idf::stats {

// Regularized upper incomplete gamma Q(a, x); series for x < a+1, continued
// fraction otherwise.
double gamma_q(double a, double x);

// Survival function of the chi-square distribution.
double chi_square_sf(double x, int df);

// Standard normal CDF via erfc (absolute error well below 1e-7).
double normal_cdf(double z);

// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(const std::vector<double>& values);

struct FriedmanResult {
    double chi_square = 0.0;
    int df = 0;
    double p_value = 1.0;
};

// Friedman rank test over an N x k within-subjects table (row = participant),
// tie-corrected. A table of complete ties yields chi2 = 0, p = 1.
FriedmanResult friedman_test(const std::vector<std::vector<double>>& table);

struct WilcoxonResult {
    double statistic = 0.0;   // min(W+, W-)
    double p_two_sided = 1.0;
    int n_nonzero = 0;
    bool degenerate = false;  // all differences were zero
    bool exact = false;       // exact enumeration (n <= 20) vs normal approx
};

// Paired Wilcoxon signed-rank test; zero differences dropped, ties get
// average ranks. Exact null distribution for n <= 20, normal approximation
// with continuity and tie correction beyond.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y);

// min(1, p * m)
double bonferroni(double p, int m);

}  // namespace idf::stats
