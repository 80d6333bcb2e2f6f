#include "thors/threshold.hpp"

#include "thors/error.hpp"

#include <cmath>
#include <string>

namespace thors {

namespace {

double cost_from_counts(const ValidationScores& vs, std::size_t k0, std::size_t k1,
                        const CostMatrix& cm)
{
    return cm.fp_cost() * double(vs.n0() - k0) + cm.fn_cost() * double(k1);
}

ThresholdSelection make_selection(const ValidationScores& vs, const CostMatrix& cm, double c,
                                  std::size_t k0, std::size_t k1)
{
    const double nv = double(vs.size());
    ThresholdSelection sel;
    sel.c_star = c;
    sel.k0 = k0;
    sel.k1 = k1;
    sel.k_star = k0 + k1;
    sel.objective = (double(k1) - cm.beta() * double(k0)) / nv;
    sel.empirical_fpr = double(vs.n0() - k0) / double(vs.n0());
    sel.empirical_fnr = double(k1) / double(vs.n1());
    sel.empirical_cost_per_sample = cost_from_counts(vs, k0, k1, cm) / nv;
    return sel;
}

} // namespace

ThresholdSelection select_threshold(const ValidationScores& vs, const CostMatrix& cm,
                                    SelectOptions options)
{
    const auto sorted = vs.sorted();
    const double beta = cm.beta();

    // Candidates are compared on k1 - beta * k0, which orders them exactly
    // like the objective (the 1/n_v factor is common).
    bool have_best = false;
    double best_value = 0.0;
    double best_c = 0.0;
    std::size_t best_k0 = 0;
    std::size_t best_k1 = 0;

    if (options.allow_all_positive) {
        have_best = true;
        best_value = 0.0;
        best_c = kAllPositive;
    }

    std::size_t k0 = 0;
    std::size_t k1 = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].label == 1) {
            ++k1;
        } else {
            ++k0;
        }
        // Equal scores give the same (k0, k1); evaluate once, at the last one.
        if (i + 1 < sorted.size() && sorted[i + 1].score == sorted[i].score) {
            continue;
        }
        const double value = double(k1) - beta * double(k0);
        if (!have_best || value < best_value) {
            have_best = true;
            best_value = value;
            best_c = sorted[i].score;
            best_k0 = k0;
            best_k1 = k1;
        }
    }
    return make_selection(vs, cm, best_c, best_k0, best_k1);
}

double objective(std::size_t k, const ValidationScores& vs, const CostMatrix& cm)
{
    if (k < 1 || k > vs.size()) {
        throw Error(ErrorCode::RankOutOfRange,
                    "rank " + std::to_string(k) + " outside 1.." + std::to_string(vs.size()));
    }
    const double t = vs.sorted()[k - 1].score;
    const double k0 = double(vs.count0_at_or_below(t));
    const double k1 = double(vs.count1_at_or_below(t));
    return vs.pi1_hat() * k1 / double(vs.n1()) - cm.beta() * vs.pi0_hat() * k0 / double(vs.n0());
}

double empirical_cost(const ValidationScores& vs, double threshold, const CostMatrix& cm)
{
    if (std::isnan(threshold)) {
        throw Error(ErrorCode::InvalidArgument, "threshold is NaN");
    }
    return cost_from_counts(vs, vs.count0_at_or_below(threshold), vs.count1_at_or_below(threshold),
                            cm);
}

int classify(double score, double threshold)
{
    return score > threshold ? 1 : 0;
}

double test_cost(std::span<const LabeledScore> test, double threshold, const CostMatrix& cm)
{
    if (test.empty()) {
        throw Error(ErrorCode::EmptyTestSet, "test set is empty");
    }
    if (std::isnan(threshold)) {
        throw Error(ErrorCode::InvalidArgument, "threshold is NaN");
    }
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (const auto& s : test) {
        const int predicted = classify(s.score, threshold);
        if (s.label == 0 && predicted == 1) {
            ++fp;
        } else if (s.label == 1 && predicted == 0) {
            ++fn;
        }
    }
    return cm.fp_cost() * double(fp) + cm.fn_cost() * double(fn);
}

} // namespace thors
