#pragma once

#include "thors/classifiers.hpp"
#include "thors/cost_matrix.hpp"
#include "thors/dataset.hpp"
#include "thors/validation.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace thors {

enum class Method { Thors, Null, Theoretical, Empirical, Metacost, Crs };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
bool is_threshold_method(Method m);

/// Outcome of one comparison method: a threshold for the thresholding
/// methods, a retrained scorer for the meta-learners.
struct BaselineResult {
    Method method = Method::Null;
    std::optional<double> threshold;
    std::optional<Scorer> scorer;
    double wall_seconds = 0.0;
    std::string warning;
};

struct NullThreshold {
    double threshold;
    bool warned; // score type unknown, fell back to 0.5
};

/// Default decision rule of the base classifier: 0.5 on probabilities, 0 on
/// discriminant values.
NullThreshold null_threshold(ScoreType type);

/// beta / (1 + beta), the cost-optimal cut on calibrated probabilities.
double theoretical_threshold(const CostMatrix& cm);

/// As above, but throws Error(NotProbabilityScorer) for discriminant scores.
double theoretical_threshold(const CostMatrix& cm, ScoreType type);

/// Grid search: evaluates validation cost at lo, lo + step, ... (<= hi) by
/// classifying every validation score at each grid point; ties go to the
/// smallest grid point.
double empirical_threshold(const ValidationScores& vs, const CostMatrix& cm, double lo, double hi,
                           double step);

inline constexpr std::size_t kDefaultGridSteps = 1000;

/// Grid over [min score, max score] with kDefaultGridSteps steps.
double empirical_threshold(const ValidationScores& vs, const CostMatrix& cm,
                           std::size_t steps = kDefaultGridSteps);

inline constexpr int kResampleRetries = 10;

/// Cost-proportionate rejection sampling: each row kept independently with
/// probability (its misclassification cost) / max(fn_cost, fp_cost).
/// Throws Error(EmptyResample) if a class vanishes kResampleRetries times.
Dataset crs_resample(const Dataset& train, const CostMatrix& cm, std::uint64_t seed);

using Trainer = std::function<Scorer(const Dataset&)>;

struct MetacostConfig {
    std::size_t replicates = 50;
    std::size_t threads = 1;
};

struct MetacostResult {
    Scorer scorer;
    std::vector<double> prob_positive; // vote fraction per training row
    std::vector<int> relabeled;
    bool fell_back = false; // relabeling collapsed to one class
};

/// Label that minimizes expected cost given P(1|x):
/// predict 1 iff P(0|x) fp_cost < P(1|x) fn_cost.
int min_cost_label(double p1, const CostMatrix& cm);

/// Bagging-based relabel-and-retrain. Replicate r uses derive_seed(seed, r),
/// so any thread count gives the same result.
MetacostResult metacost(const Dataset& train, const CostMatrix& cm, const Trainer& trainer,
                        std::uint64_t seed, const MetacostConfig& config = {});

} // namespace thors
