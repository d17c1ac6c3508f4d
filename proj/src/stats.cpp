#include "idf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace idf::stats {

double gamma_q(double a, double x) {
    if (a <= 0 || x < 0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0) return 1.0;
    if (x < a + 1.0) {
        // lower series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a)_{n+1}
        double term = 1.0 / a;
        double sum = term;
        double n = a;
        for (int i = 0; i < 1000; ++i) {
            n += 1.0;
            term *= x / n;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi_square_sf: df must be >= 1");
    if (x <= 0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); }

std::vector<double> average_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& table) {
    const size_t n = table.size();
    if (n < 2) throw std::invalid_argument("friedman_test: need at least 2 participants");
    const size_t k = table[0].size();
    if (k < 2) throw std::invalid_argument("friedman_test: need at least 2 conditions");
    for (const auto& row : table)
        if (row.size() != k) throw std::invalid_argument("friedman_test: ragged table");

    // column rank sums and the tie-corrected statistic
    //   chi2 = (k-1) sum_j (R_j - n(k+1)/2)^2 / (sum_ij r_ij^2 - n k (k+1)^2 / 4)
    // which reduces to the classic 12/(nk(k+1)) form without ties
    std::vector<double> colsum(k, 0.0);
    double sum_sq = 0.0;
    for (const auto& row : table) {
        std::vector<double> r = average_ranks(row);
        for (size_t j = 0; j < k; ++j) {
            colsum[j] += r[j];
            sum_sq += r[j] * r[j];
        }
    }
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    double num = 0.0;
    for (size_t j = 0; j < k; ++j) {
        double d = colsum[j] - nn * (kk + 1.0) / 2.0;
        num += d * d;
    }
    num *= (kk - 1.0);
    double den = sum_sq - nn * kk * (kk + 1.0) * (kk + 1.0) / 4.0;

    FriedmanResult r;
    r.df = static_cast<int>(k) - 1;
    if (den <= 1e-12) {
        r.chi_square = 0.0;  // complete ties
        r.p_value = 1.0;
        return r;
    }
    r.chi_square = num / den;
    r.p_value = chi_square_sf(r.chi_square, r.df);
    return r;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("wilcoxon_signed_rank: paired lists differ in length");
    std::vector<double> diff;
    diff.reserve(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        if (d != 0.0) diff.push_back(d);
    }
    WilcoxonResult res;
    res.n_nonzero = static_cast<int>(diff.size());
    if (diff.empty()) {
        res.degenerate = true;
        res.p_two_sided = 1.0;
        return res;
    }

    std::vector<double> mags(diff.size());
    for (size_t i = 0; i < diff.size(); ++i) mags[i] = std::fabs(diff[i]);
    std::vector<double> ranks = average_ranks(mags);
    double w_pos = 0.0, w_neg = 0.0;
    for (size_t i = 0; i < diff.size(); ++i) {
        if (diff[i] > 0)
            w_pos += ranks[i];
        else
            w_neg += ranks[i];
    }
    const double w = std::min(w_pos, w_neg);
    res.statistic = w;
    const int n = res.n_nonzero;

    if (n <= 20) {
        // exact enumeration via DP over doubled ranks (ties make halves)
        std::vector<long long> r2(ranks.size());
        long long total2 = 0;
        for (size_t i = 0; i < ranks.size(); ++i) {
            r2[i] = std::llround(2.0 * ranks[i]);
            total2 += r2[i];
        }
        std::vector<double> dist(static_cast<size_t>(total2) + 1, 0.0);
        dist[0] = 1.0;
        long long reach = 0;
        for (long long v : r2) {
            for (long long s = std::min(reach, total2 - v); s >= 0; --s)
                if (dist[static_cast<size_t>(s)] > 0)
                    dist[static_cast<size_t>(s + v)] += dist[static_cast<size_t>(s)];
            reach += v;
        }
        double denom = std::ldexp(1.0, n);  // 2^n patterns
        long long w2 = std::llround(2.0 * w);
        double p = 0.0;
        for (long long s = 0; s <= w2; ++s) p += dist[static_cast<size_t>(s)];
        for (long long s = total2 - w2; s <= total2; ++s) p += dist[static_cast<size_t>(s)];
        // the two tails overlap when w is at the center
        if (w2 >= total2 - w2)
            p = static_cast<double>(std::accumulate(dist.begin(), dist.end(), 0.0));
        res.p_two_sided = std::min(1.0, p / denom);
        res.exact = true;
        return res;
    }

    // normal approximation with continuity and tie correction
    double mu = n * (n + 1.0) / 4.0;
    double tie_sum = 0.0;
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_sum / 48.0;
    double z = (w - mu + 0.5) / std::sqrt(var);
    res.p_two_sided = std::min(1.0, 2.0 * normal_cdf(z));
    res.exact = false;
    return res;
}

double bonferroni(double p, int m) {
    if (p < 0 || p > 1) throw std::invalid_argument("bonferroni: p outside [0, 1]");
    if (m < 1) throw std::invalid_argument("bonferroni: m must be >= 1");
    return std::min(1.0, p * m);
}

}  // namespace idf::stats
