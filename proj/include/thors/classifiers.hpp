#pragma once

#include "thors/cost_matrix.hpp"
#include "thors/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace thors {

enum class ScorerKind { Logistic, GaussianNB, LDA };
enum class ScoreType { Probability, Discriminant, Unknown };

std::string_view to_string(ScorerKind kind);
ScorerKind parse_scorer_kind(std::string_view name);

/// Per-feature centring and scaling fitted on a training matrix.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// A trained scoring function. Higher score = more class-1-like.
struct Scorer {
    ScorerKind kind = ScorerKind::Logistic;
    ScoreType type = ScoreType::Probability;

    // Logistic / LDA: score is built from standardized features.
    Standardizer standardizer;
    Eigen::VectorXd weights;
    double intercept = 0.0;

    // Gaussian naive Bayes.
    Eigen::MatrixXd class_means;     // 2 x d
    Eigen::MatrixXd class_variances; // 2 x d
    double log_prior0 = 0.0;
    double log_prior1 = 0.0;

    // Logistic training diagnostics.
    bool converged = true;
    double final_gradient_norm = 0.0;
    std::size_t iterations = 0;
};

/// Two-group one-way ANOVA F statistic per feature. A feature with zero
/// within-class variance but separated means gets +inf; a constant feature
/// gets 0.
std::vector<double> anova_f_scores(const Dataset& ds);

/// Indices of the k largest F values, descending, ties to the lower index.
/// Throws Error(InvalidArgument) unless 1 <= k <= d.
std::vector<std::size_t> anova_f_select(const Dataset& ds, std::size_t k);

struct LogisticConfig {
    std::size_t max_iter = 100;
    double tol = 1e-8;
    double l2 = 1e-4;
};

/// Per-instance weights for cost-weighted logistic regression: class 1
/// weighted by fn_cost, class 0 by fp_cost, normalized to mean 1.
Eigen::VectorXd cost_weights(const std::vector<int>& labels, const CostMatrix& cm);

/// Weighted negative log-likelihood (averaged) plus l2/2 |w|^2, and its
/// gradient with respect to (w, b). `params` holds w followed by b.
double logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                     const Eigen::VectorXd& weights, const Eigen::VectorXd& params, double l2,
                     Eigen::VectorXd* gradient);

/// Newton's method with backtracking from zero. Never throws on
/// non-convergence; check Scorer::converged.
Scorer train_logistic(const Dataset& ds, const CostMatrix& cm, const LogisticConfig& config = {});

inline constexpr double kNaiveBayesVarianceFloor = 1e-9;
Scorer train_gaussian_nb(const Dataset& ds);

/// Pooled-covariance LDA; ridge 1e-6 * trace / d keeps it invertible.
Scorer train_lda(const Dataset& ds);

std::vector<double> score(const Scorer& sc, const Eigen::MatrixXd& x);
double score_row(const Scorer& sc, const Eigen::RowVectorXd& row);

/// Train the given kind. Only logistic regression uses the costs.
Scorer train_scorer(ScorerKind kind, const Dataset& ds, const CostMatrix& cm);

} // namespace thors
