#pragma once

#include "thors/cost_matrix.hpp"
#include "thors/validation.hpp"

#include <cstddef>
#include <limits>
#include <span>

namespace thors {

/// Threshold used for the "everything is positive" rule.
inline constexpr double kAllPositive = -std::numeric_limits<double>::infinity();

struct ThresholdSelection {
    double c_star = 0.0;
    std::size_t k_star = 0;   // rank of c_star among sorted scores, k0 + k1
    std::size_t k0 = 0;       // class-0 scores <= c_star
    std::size_t k1 = 0;       // class-1 scores <= c_star
    double objective = 0.0;   // (k1 - beta * k0) / n_v
    double empirical_fpr = 0.0;
    double empirical_fnr = 0.0;
    double empirical_cost_per_sample = 0.0;
};

struct SelectOptions {
    /// Also consider the threshold below every score (k = 0). Off by
    /// default; the order-statistic search covers ranks 1..n_v only.
    bool allow_all_positive = false;
};

/// Order-statistic threshold search.
///
/// Scans the sorted validation scores once, evaluating the cost objective
/// only at the last occurrence of each distinct score so that k0/k1 are
/// counted by value. Ties in the objective go to the lowest threshold.
ThresholdSelection select_threshold(const ValidationScores& vs, const CostMatrix& cm,
                                    SelectOptions options = {});

/// pi1_hat * k1 / n1 - beta * pi0_hat * k0 / n0 at rank k (1-based), with
/// k0/k1 counted by value at T_(k). Throws Error(RankOutOfRange).
double objective(std::size_t k, const ValidationScores& vs, const CostMatrix& cm);

/// Total validation cost fp_cost * #FP + fn_cost * #FN when classifying with
/// `threshold`.
double empirical_cost(const ValidationScores& vs, double threshold, const CostMatrix& cm);

/// 1 iff score > threshold.
int classify(double score, double threshold);

/// Realized cost of `threshold` on a labelled test set. Throws
/// Error(EmptyTestSet).
double test_cost(std::span<const LabeledScore> test, double threshold, const CostMatrix& cm);

} // namespace thors
