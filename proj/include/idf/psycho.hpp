#pragma once

#include <map>
#include <string>
#include <vector>

#include "idf/stats.hpp"

namespace idf::psycho {

struct TrialResponse {
    std::string participant_id;
    double sigma_px = 0.0;
    bool same = false;  // true = reported `same` (a miss when sigma > 0)
};

struct PsychometricFit {
    double a = 0.0;
    double b = 0.0;
    double pse = 0.0;  // sigma at 50% miss rate, -b/a
    double dt = 0.0;   // sigma at the miss_criterion rate
    bool converged = false;

    double evaluate(double sigma) const;
};

// Table 3 convention: the detection threshold sits at a 25% miss rate.
inline constexpr double kDefaultDtCriterion = 0.25;

struct LikertTable {
    std::string attribute;
    std::vector<double> conditions;               // sigma levels (columns)
    std::vector<std::vector<double>> ratings;     // rows = participants, 1..5
};

// Fraction of `same` responses per sigma level.
std::map<double, double> miss_rate(const std::vector<TrialResponse>& responses);

struct ExclusionReport {
    std::vector<std::string> kept;
    std::vector<std::string> excluded;
};

// Drops participants answering `different` at sigma = 0 half the time or
// more. Every participant must have sigma = 0 trials.
ExclusionReport exclude_participants(
    const std::map<std::string, std::vector<TrialResponse>>& by_participant);

// Trial-level binomial MLE logistic fit of P(same) on sigma.
PsychometricFit fit_psychometric(const std::vector<TrialResponse>& responses,
                                 double dt_criterion = kDefaultDtCriterion);

// Two-stage pooled curve: average the per-participant miss rates per sigma,
// then least-squares fit the logistic to the averaged fractions.
PsychometricFit pooled_curve(
    const std::map<std::string, std::map<double, double>>& per_participant_miss_rates,
    double dt_criterion = kDefaultDtCriterion);

stats::FriedmanResult friedman_test(const LikertTable& table);

struct PairwiseComparison {
    int condition_a = 0;
    int condition_b = 0;
    double statistic = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
};

// All condition pairs, Wilcoxon signed-rank with Bonferroni adjustment.
std::vector<PairwiseComparison> pairwise_wilcoxon(const LikertTable& table);

}  // namespace idf::psycho
