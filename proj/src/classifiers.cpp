#include "thors/classifiers.hpp"

#include "thors/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace thors {

namespace {

void require_trainable(const Dataset& ds)
{
    ds.validate();
    if (ds.rows() < 2) {
        throw Error(ErrorCode::InvalidArgument, "need at least two training rows");
    }
    if (ds.count(0) == 0 || ds.count(1) == 0) {
        throw Error(ErrorCode::MissingClass, "training data needs both classes");
    }
    if (ds.has_missing()) {
        throw Error(ErrorCode::InvalidArgument, "training data has missing values; impute first");
    }
}

double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z))
double softplus(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

} // namespace

std::string_view to_string(ScorerKind kind)
{
    switch (kind) {
    case ScorerKind::Logistic: return "logit";
    case ScorerKind::GaussianNB: return "nb";
    case ScorerKind::LDA: return "lda";
    }
    return "unknown";
}

ScorerKind parse_scorer_kind(std::string_view name)
{
    if (name == "logit" || name == "logistic") {
        return ScorerKind::Logistic;
    }
    if (name == "nb" || name == "naive_bayes") {
        return ScorerKind::GaussianNB;
    }
    if (name == "lda") {
        return ScorerKind::LDA;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown scorer '" + std::string(name) + "'");
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x)
{
    Standardizer s;
    const double n = double(x.rows());
    s.mean = x.colwise().mean();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
        const double sd = std::sqrt(var);
        s.scale(j) = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const
{
    return (x.rowwise() - mean).array().rowwise() / scale.array();
}

std::vector<double> anova_f_scores(const Dataset& ds)
{
    ds.validate();
    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();
    const double n0 = double(ds.count(0));
    const double n1 = double(ds.count(1));
    std::vector<double> f(d, 0.0);
    if (n0 == 0 || n1 == 0 || n < 3) {
        return f;
    }
    for (std::size_t j = 0; j < d; ++j) {
        const auto col = ds.features.col(static_cast<Eigen::Index>(j));
        double sum0 = 0.0;
        double sum1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            (ds.labels[i] == 1 ? sum1 : sum0) += col(static_cast<Eigen::Index>(i));
        }
        const double m0 = sum0 / n0;
        const double m1 = sum1 / n1;
        const double m = (sum0 + sum1) / double(n);
        double within = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = ds.labels[i] == 1 ? m1 : m0;
            const double r = col(static_cast<Eigen::Index>(i)) - c;
            within += r * r;
        }
        const double between = n0 * (m0 - m) * (m0 - m) + n1 * (m1 - m) * (m1 - m);
        // G = 2 groups: between / (G - 1) over within / (n - G).
        const double ms_between = between;
        const double ms_within = within / double(n - 2);
        if (ms_within > 0.0) {
            f[j] = ms_between / ms_within;
        } else {
            f[j] = ms_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
    }
    return f;
}

std::vector<std::size_t> anova_f_select(const Dataset& ds, std::size_t k)
{
    if (k < 1 || k > ds.cols()) {
        throw Error(ErrorCode::InvalidArgument,
                    "feature count k=" + std::to_string(k) + " outside 1.." + std::to_string(ds.cols()));
    }
    const auto f = anova_f_scores(ds);
    std::vector<std::size_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    idx.resize(k);
    return idx;
}

Eigen::VectorXd cost_weights(const std::vector<int>& labels, const CostMatrix& cm)
{
    Eigen::VectorXd w(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        w(static_cast<Eigen::Index>(i)) = labels[i] == 1 ? cm.fn_cost() : cm.fp_cost();
    }
    if (w.size() > 0) {
        w *= double(w.size()) / w.sum();
    }
    return w;
}

double logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                     const Eigen::VectorXd& weights, const Eigen::VectorXd& params, double l2,
                     Eigen::VectorXd* gradient)
{
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const auto w = params.head(d);
    const double b = params(d);
    const Eigen::VectorXd z = (x * w).array() + b;

    double loss = 0.0;
    Eigen::VectorXd residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = labels[static_cast<std::size_t>(i)];
        loss += weights(i) * (softplus(z(i)) - y * z(i));
        residual(i) = weights(i) * (sigmoid(z(i)) - y);
    }
    loss = loss / double(n) + 0.5 * l2 * w.squaredNorm();

    if (gradient != nullptr) {
        gradient->resize(d + 1);
        gradient->head(d) = x.transpose() * residual / double(n) + l2 * w;
        (*gradient)(d) = residual.sum() / double(n);
    }
    return loss;
}

Scorer train_logistic(const Dataset& ds, const CostMatrix& cm, const LogisticConfig& config)
{
    require_trainable(ds);
    Scorer sc;
    sc.kind = ScorerKind::Logistic;
    sc.type = ScoreType::Probability;
    sc.standardizer = Standardizer::fit(ds.features);
    const Eigen::MatrixXd x = sc.standardizer.apply(ds.features);
    const Eigen::VectorXd omega = cost_weights(ds.labels, cm);
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();

    Eigen::VectorXd params = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd grad;
    double loss = logistic_loss(x, ds.labels, omega, params, config.l2, &grad);

    Eigen::MatrixXd xa(n, d + 1);
    xa.leftCols(d) = x;
    xa.col(d).setOnes();

    sc.converged = false;
    std::size_t it = 0;
    for (; it < config.max_iter; ++it) {
        if (grad.norm() < config.tol) {
            sc.converged = true;
            break;
        }
        const Eigen::VectorXd z = xa * params;
        Eigen::VectorXd curvature(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = sigmoid(z(i));
            curvature(i) = omega(i) * p * (1.0 - p);
        }
        Eigen::MatrixXd hessian = xa.transpose() * curvature.asDiagonal() * xa / double(n);
        for (Eigen::Index j = 0; j < d; ++j) {
            hessian(j, j) += config.l2;
        }
        hessian(d, d) += 1e-12;
        const Eigen::VectorXd step = hessian.ldlt().solve(-grad);

        // Armijo backtracking.
        double t = 1.0;
        const double slope = grad.dot(step);
        Eigen::VectorXd next;
        Eigen::VectorXd next_grad;
        double next_loss = loss;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            next = params + t * step;
            next_loss = logistic_loss(x, ds.labels, omega, next, config.l2, &next_grad);
            if (next_loss <= loss + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            break;
        }
        params = next;
        grad = next_grad;
        loss = next_loss;
    }
    if (!sc.converged && grad.norm() < config.tol) {
        sc.converged = true;
    }
    sc.iterations = it;
    sc.final_gradient_norm = grad.norm();
    sc.weights = params.head(d);
    sc.intercept = params(d);
    return sc;
}

Scorer train_gaussian_nb(const Dataset& ds)
{
    require_trainable(ds);
    Scorer sc;
    sc.kind = ScorerKind::GaussianNB;
    sc.type = ScoreType::Probability;
    const Eigen::Index d = ds.features.cols();
    sc.class_means = Eigen::MatrixXd::Zero(2, d);
    sc.class_variances = Eigen::MatrixXd::Zero(2, d);
    const double counts[2] = {double(ds.count(0)), double(ds.count(1))};

    for (std::size_t i = 0; i < ds.rows(); ++i) {
        sc.class_means.row(ds.labels[i]) += ds.features.row(static_cast<Eigen::Index>(i));
    }
    for (int c = 0; c < 2; ++c) {
        sc.class_means.row(c) /= counts[c];
    }
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const int c = ds.labels[i];
        sc.class_variances.row(c) +=
            (ds.features.row(static_cast<Eigen::Index>(i)) - sc.class_means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < 2; ++c) {
        sc.class_variances.row(c) /= counts[c];
        sc.class_variances.row(c) = sc.class_variances.row(c).cwiseMax(kNaiveBayesVarianceFloor);
    }
    const double n = double(ds.rows());
    sc.log_prior0 = std::log(counts[0] / n);
    sc.log_prior1 = std::log(counts[1] / n);
    return sc;
}

Scorer train_lda(const Dataset& ds)
{
    require_trainable(ds);
    Scorer sc;
    sc.kind = ScorerKind::LDA;
    sc.type = ScoreType::Discriminant;
    sc.standardizer = Standardizer::fit(ds.features);
    const Eigen::MatrixXd x = sc.standardizer.apply(ds.features);
    const Eigen::Index d = x.cols();

    Eigen::RowVectorXd mu[2] = {Eigen::RowVectorXd::Zero(d), Eigen::RowVectorXd::Zero(d)};
    const double counts[2] = {double(ds.count(0)), double(ds.count(1))};
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        mu[ds.labels[i]] += x.row(static_cast<Eigen::Index>(i));
    }
    mu[0] /= counts[0];
    mu[1] /= counts[1];

    Eigen::MatrixXd centred(x.rows(), d);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        centred.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(i)) - mu[ds.labels[i]];
    }
    const double dof = std::max(1.0, double(ds.rows()) - 2.0);
    Eigen::MatrixXd cov = centred.transpose() * centred / dof;
    const double trace = cov.trace();
    const double ridge = 1e-6 * (trace > 0.0 ? trace / double(d) : 1.0);
    cov.diagonal().array() += ridge;

    const Eigen::VectorXd delta = (mu[1] - mu[0]).transpose();
    sc.weights = cov.ldlt().solve(delta);
    const Eigen::VectorXd mid = 0.5 * (mu[0] + mu[1]).transpose();
    sc.intercept = -sc.weights.dot(mid) + std::log(counts[1] / counts[0]);
    return sc;
}

double score_row(const Scorer& sc, const Eigen::RowVectorXd& row)
{
    switch (sc.kind) {
    case ScorerKind::Logistic: {
        const Eigen::RowVectorXd z = (row - sc.standardizer.mean).array() / sc.standardizer.scale.array();
        return sigmoid(z.dot(sc.weights) + sc.intercept);
    }
    case ScorerKind::LDA: {
        const Eigen::RowVectorXd z = (row - sc.standardizer.mean).array() / sc.standardizer.scale.array();
        return z.dot(sc.weights) + sc.intercept;
    }
    case ScorerKind::GaussianNB: {
        double log_odds = sc.log_prior1 - sc.log_prior0;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            for (int c = 0; c < 2; ++c) {
                const double var = sc.class_variances(c, j);
                const double r = row(j) - sc.class_means(c, j);
                const double ll = -0.5 * std::log(2.0 * M_PI * var) - 0.5 * r * r / var;
                log_odds += c == 1 ? ll : -ll;
            }
        }
        return sigmoid(log_odds);
    }
    }
    return 0.0;
}

std::vector<double> score(const Scorer& sc, const Eigen::MatrixXd& x)
{
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = score_row(sc, x.row(i));
    }
    return out;
}

Scorer train_scorer(ScorerKind kind, const Dataset& ds, const CostMatrix& cm)
{
    switch (kind) {
    case ScorerKind::Logistic: return train_logistic(ds, cm);
    case ScorerKind::GaussianNB: return train_gaussian_nb(ds);
    case ScorerKind::LDA: return train_lda(ds);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown scorer kind");
}

} // namespace thors
