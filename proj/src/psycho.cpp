#include "idf/psycho.hpp"

#include <cmath>
#include <stdexcept>

#include "idf/errors.hpp"
#include "idf/logistic.hpp"

namespace idf::psycho {

double PsychometricFit::evaluate(double sigma) const { return logistic::sigmoid(a, b, sigma); }

std::map<double, double> miss_rate(const std::vector<TrialResponse>& responses) {
    if (responses.empty()) throw std::invalid_argument("miss_rate: no responses");
    std::map<double, std::pair<long, long>> counts;  // sigma -> (same, total)
    for (const auto& r : responses) {
        auto& c = counts[r.sigma_px];
        if (r.same) ++c.first;
        ++c.second;
    }
    std::map<double, double> out;
    for (const auto& [sigma, c] : counts)
        out[sigma] = static_cast<double>(c.first) / static_cast<double>(c.second);
    return out;
}

ExclusionReport exclude_participants(
    const std::map<std::string, std::vector<TrialResponse>>& by_participant) {
    ExclusionReport rep;
    for (const auto& [pid, responses] : by_participant) {
        long zero_total = 0, zero_different = 0;
        for (const auto& r : responses) {
            if (r.sigma_px == 0.0) {
                ++zero_total;
                if (!r.same) ++zero_different;
            }
        }
        if (zero_total == 0)
            throw std::invalid_argument("exclude_participants: participant " + pid +
                                        " has no sigma=0 trials");
        double frac = static_cast<double>(zero_different) / static_cast<double>(zero_total);
        if (frac >= 0.5)
            rep.excluded.push_back(pid);
        else
            rep.kept.push_back(pid);
    }
    return rep;
}

namespace {

PsychometricFit finish_fit(const logistic::Fit& f, double dt_criterion) {
    PsychometricFit fit;
    fit.a = f.a;
    fit.b = f.b;
    fit.converged = f.converged;
    if (std::fabs(f.a) < 1e-8)
        throw UndefinedThreshold("psychometric fit: slope is zero, PSE/DT undefined");
    fit.pse = -f.b / f.a;
    // miss rate q at the DT: logit(q) = a*dt + b
    double logit_q = std::log(dt_criterion / (1.0 - dt_criterion));
    fit.dt = (logit_q - f.b) / f.a;
    return fit;
}

}  // namespace

PsychometricFit fit_psychometric(const std::vector<TrialResponse>& responses,
                                 double dt_criterion) {
    if (!(dt_criterion > 0 && dt_criterion < 1))
        throw std::invalid_argument("fit_psychometric: dt criterion outside (0, 1)");
    std::map<double, std::pair<double, double>> grouped;  // sigma -> (same, total)
    for (const auto& r : responses) {
        auto& g = grouped[r.sigma_px];
        if (r.same) g.first += 1.0;
        g.second += 1.0;
    }
    if (grouped.size() < 2)
        throw std::invalid_argument("fit_psychometric: need responses at >= 2 sigma levels");
    std::vector<logistic::BinomialPoint> pts;
    pts.reserve(grouped.size());
    for (const auto& [sigma, g] : grouped) pts.push_back({sigma, g.first, g.second});
    return finish_fit(logistic::fit_binomial(pts), dt_criterion);
}

PsychometricFit pooled_curve(
    const std::map<std::string, std::map<double, double>>& per_participant_miss_rates,
    double dt_criterion) {
    if (per_participant_miss_rates.empty())
        throw std::invalid_argument("pooled_curve: no participants");
    std::map<double, std::pair<double, long>> acc;  // sigma -> (sum, count)
    for (const auto& [pid, rates] : per_participant_miss_rates) {
        (void)pid;
        for (const auto& [sigma, rate] : rates) {
            acc[sigma].first += rate;
            acc[sigma].second += 1;
        }
    }
    std::vector<std::pair<double, double>> averaged;
    averaged.reserve(acc.size());
    for (const auto& [sigma, sc] : acc)
        averaged.emplace_back(sigma, sc.first / static_cast<double>(sc.second));
    if (averaged.size() < 2)
        throw std::invalid_argument("pooled_curve: need >= 2 sigma levels");
    return finish_fit(logistic::fit_fractions_lsq(averaged), dt_criterion);
}

stats::FriedmanResult friedman_test(const LikertTable& table) {
    if (table.conditions.size() < 2)
        throw std::invalid_argument("friedman_test: need at least 2 conditions");
    return stats::friedman_test(table.ratings);
}

std::vector<PairwiseComparison> pairwise_wilcoxon(const LikertTable& table) {
    const int k = static_cast<int>(table.conditions.size());
    if (k < 2) throw std::invalid_argument("pairwise_wilcoxon: need at least 2 conditions");
    const int m = k * (k - 1) / 2;
    std::vector<PairwiseComparison> out;
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            std::vector<double> xa, xb;
            for (const auto& row : table.ratings) {
                xa.push_back(row[static_cast<size_t>(a)]);
                xb.push_back(row[static_cast<size_t>(b)]);
            }
            stats::WilcoxonResult w = stats::wilcoxon_signed_rank(xa, xb);
            PairwiseComparison c;
            c.condition_a = a;
            c.condition_b = b;
            c.statistic = w.statistic;
            c.p_raw = w.p_two_sided;
            c.p_adjusted = stats::bonferroni(w.p_two_sided, m);
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace idf::psycho
