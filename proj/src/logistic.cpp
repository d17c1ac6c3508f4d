#include "idf/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "idf/errors.hpp"

namespace idf::logistic {

namespace {

// complete separation: every success lies strictly on one side of every
// failure along x
bool completely_separated(const std::vector<BinomialPoint>& pts, int* direction) {
    double min_succ = std::numeric_limits<double>::infinity();
    double max_succ = -std::numeric_limits<double>::infinity();
    double min_fail = std::numeric_limits<double>::infinity();
    double max_fail = -std::numeric_limits<double>::infinity();
    bool any_succ = false, any_fail = false;
    for (const auto& p : pts) {
        if (p.successes > 0) {
            any_succ = true;
            min_succ = std::min(min_succ, p.x);
            max_succ = std::max(max_succ, p.x);
        }
        if (p.successes < p.trials) {
            any_fail = true;
            min_fail = std::min(min_fail, p.x);
            max_fail = std::max(max_fail, p.x);
        }
    }
    if (!any_succ || !any_fail) return false;  // flat data, handled separately
    if (max_succ < min_fail) {
        *direction = -1;  // successes at low x: slope diverges to -inf
        return true;
    }
    if (max_fail < min_succ) {
        *direction = +1;
        return true;
    }
    return false;
}

double loglik(const std::vector<BinomialPoint>& pts, double a, double b) {
    double ll = 0.0;
    for (const auto& p : pts) {
        double mu = sigmoid(a, b, p.x);
        mu = std::clamp(mu, 1e-300, 1.0 - 1e-16);
        ll += p.successes * std::log(mu) + (p.trials - p.successes) * std::log1p(-mu);
    }
    return ll;
}

void init_guess(const std::vector<BinomialPoint>& pts, double* a, double* b) {
    // logit regression on smoothed fractions
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto& p : pts) {
        double frac = (p.successes + 0.5) / (p.trials + 1.0);
        double z = std::log(frac / (1.0 - frac));
        sx += p.x;
        sy += z;
        sxx += p.x * p.x;
        sxy += p.x * z;
        n += 1;
    }
    double det = n * sxx - sx * sx;
    if (std::fabs(det) < 1e-12) {
        *a = 0.0;
        *b = sy / n;
        return;
    }
    *a = (n * sxy - sx * sy) / det;
    *b = (sy * sxx - sx * sxy) / det;
}

}  // namespace

Fit fit_binomial(const std::vector<BinomialPoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("fit_binomial: need at least 2 points");
    double x0 = points.front().x;
    bool distinct = false;
    for (const auto& p : points) {
        if (p.trials < 1) throw std::invalid_argument("fit_binomial: trials must be >= 1");
        if (p.successes < 0 || p.successes > p.trials)
            throw std::invalid_argument("fit_binomial: successes outside [0, trials]");
        if (p.x != x0) distinct = true;
    }
    if (!distinct) throw std::invalid_argument("fit_binomial: need at least 2 distinct x");

    int dir = 0;
    if (completely_separated(points, &dir))
        throw SeparationError("fit_binomial: complete separation, no finite MLE", dir);

    Fit fit;
    init_guess(points, &fit.a, &fit.b);
    double ll_prev = loglik(points, fit.a, fit.b);
    for (int it = 0; it < 100; ++it) {
        double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
        for (const auto& p : points) {
            double mu = sigmoid(fit.a, fit.b, p.x);
            double w = p.trials * mu * (1.0 - mu);
            double r = p.successes - p.trials * mu;
            g0 += r * p.x;
            g1 += r;
            h00 += w * p.x * p.x;
            h01 += w * p.x;
            h11 += w;
        }
        double det = h00 * h11 - h01 * h01;
        if (std::fabs(det) < 1e-300) break;
        double da = (h11 * g0 - h01 * g1) / det;
        double db = (h00 * g1 - h01 * g0) / det;
        fit.a += da;
        fit.b += db;
        fit.iterations = it + 1;
        double ll = loglik(points, fit.a, fit.b);
        if (std::fabs(ll - ll_prev) < 1e-10) {
            fit.converged = true;
            fit.log_likelihood = ll;
            break;
        }
        ll_prev = ll;
        fit.log_likelihood = ll;
    }
    if (!std::isfinite(fit.a) || !std::isfinite(fit.b) || std::fabs(fit.a) > 1e3)
        throw SeparationError("fit_binomial: diverging slope (quasi-separation)",
                              fit.a > 0 ? +1 : -1);
    return fit;
}

Fit fit_fractions_lsq(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("fit_fractions_lsq: need at least 2 points");
    std::vector<BinomialPoint> as_binom;
    as_binom.reserve(points.size());
    for (auto [x, frac] : points) {
        if (frac < 0 || frac > 1)
            throw std::invalid_argument("fit_fractions_lsq: fraction outside [0, 1]");
        as_binom.push_back({x, frac, 1.0});
    }
    Fit fit;
    init_guess(as_binom, &fit.a, &fit.b);

    double lambda = 1e-3;
    auto sse = [&](double a, double b) {
        double s = 0;
        for (auto [x, frac] : points) {
            double r = frac - sigmoid(a, b, x);
            s += r * r;
        }
        return s;
    };
    double err = sse(fit.a, fit.b);
    for (int it = 0; it < 200; ++it) {
        double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
        for (auto [x, frac] : points) {
            double mu = sigmoid(fit.a, fit.b, x);
            double d = mu * (1.0 - mu);  // dmu/deta
            double r = frac - mu;
            g0 += r * d * x;
            g1 += r * d;
            h00 += d * d * x * x;
            h01 += d * d * x;
            h11 += d * d;
        }
        double det = (h00 + lambda) * (h11 + lambda) - h01 * h01;
        if (std::fabs(det) < 1e-300) break;
        double da = ((h11 + lambda) * g0 - h01 * g1) / det;
        double db = ((h00 + lambda) * g1 - h01 * g0) / det;
        double new_err = sse(fit.a + da, fit.b + db);
        fit.iterations = it + 1;
        if (new_err <= err) {
            fit.a += da;
            fit.b += db;
            lambda = std::max(lambda * 0.5, 1e-12);
            if (err - new_err < 1e-14) {
                fit.converged = true;
                err = new_err;
                break;
            }
            err = new_err;
        } else {
            lambda *= 10.0;
            if (lambda > 1e8) break;
        }
    }
    if (!std::isfinite(fit.a) || !std::isfinite(fit.b))
        throw SeparationError("fit_fractions_lsq: diverging parameters", fit.a > 0 ? +1 : -1);
    fit.converged = fit.converged || fit.iterations > 0;
    return fit;
}

}  // namespace idf::logistic
