#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace idf::logistic {

struct BinomialPoint {
    double x = 0.0;
    double successes = 0.0;
    double trials = 0.0;
};

struct Fit {
    double a = 0.0;  // slope
    double b = 0.0;  // intercept
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

inline double sigmoid(double a, double b, double x) {
    double eta = a * x + b;
    if (eta >= 0) {
        double e = std::exp(-eta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(eta);
    return e / (1.0 + e);
}

// Binomial maximum-likelihood logistic regression P(success) = 1/(1+e^-(ax+b))
// by Newton iteration (iteratively reweighted least squares). Converges when
// the log-likelihood improves by < 1e-10, capped at 100 iterations. Throws
// SeparationError when the data are completely separated (no finite MLE) and
// UndefinedThreshold when the fitted slope is indistinguishable from zero.
Fit fit_binomial(const std::vector<BinomialPoint>& points);

// Least-squares logistic fit to (x, fraction) pairs (Gauss-Newton with
// Levenberg damping); used for the pooled-curve procedure that fits averaged
// rates instead of trial counts.
Fit fit_fractions_lsq(const std::vector<std::pair<double, double>>& points);

}  // namespace idf::logistic
