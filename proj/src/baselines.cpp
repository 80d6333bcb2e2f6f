#include "thors/baselines.hpp"

#include "thors/error.hpp"
#include "thors/random.hpp"
#include "thors/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thors {

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::Thors: return "thors";
    case Method::Null: return "null";
    case Method::Theoretical: return "theoretical";
    case Method::Empirical: return "empirical";
    case Method::Metacost: return "metacost";
    case Method::Crs: return "crs";
    }
    return "unknown";
}

Method parse_method(std::string_view name)
{
    for (Method m : {Method::Thors, Method::Null, Method::Theoretical, Method::Empirical,
                     Method::Metacost, Method::Crs}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

bool is_threshold_method(Method m)
{
    return m != Method::Metacost && m != Method::Crs;
}

NullThreshold null_threshold(ScoreType type)
{
    switch (type) {
    case ScoreType::Probability: return {0.5, false};
    case ScoreType::Discriminant: return {0.0, false};
    case ScoreType::Unknown: return {0.5, true};
    }
    return {0.5, true};
}

double theoretical_threshold(const CostMatrix& cm)
{
    return cm.fp_cost() / (cm.fp_cost() + cm.fn_cost());
}

double theoretical_threshold(const CostMatrix& cm, ScoreType type)
{
    if (type == ScoreType::Discriminant) {
        throw Error(ErrorCode::NotProbabilityScorer,
                    "theoretical threshold needs probability scores");
    }
    return theoretical_threshold(cm);
}

double empirical_threshold(const ValidationScores& vs, const CostMatrix& cm, double lo, double hi,
                           double step)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw Error(ErrorCode::InvalidArgument, "empirical grid needs finite lo < hi");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw Error(ErrorCode::InvalidArgument, "empirical grid step must be positive");
    }
    const auto n_steps = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    const auto scores = vs.sorted();

    double best_t = lo;
    double best_cost = 0.0;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = lo + double(i) * step;
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (const auto& s : scores) {
            const int predicted = classify(s.score, t);
            fp += (s.label == 0 && predicted == 1) ? 1 : 0;
            fn += (s.label == 1 && predicted == 0) ? 1 : 0;
        }
        const double cost = cm.fp_cost() * double(fp) + cm.fn_cost() * double(fn);
        if (i == 0 || cost < best_cost) {
            best_cost = cost;
            best_t = t;
        }
    }
    return best_t;
}

double empirical_threshold(const ValidationScores& vs, const CostMatrix& cm, std::size_t steps)
{
    const auto scores = vs.sorted();
    const double lo = scores.front().score;
    const double hi = scores.back().score;
    if (!(lo < hi) || steps == 0) {
        return lo;
    }
    return empirical_threshold(vs, cm, lo, hi, (hi - lo) / double(steps));
}

Dataset crs_resample(const Dataset& train, const CostMatrix& cm, std::uint64_t seed)
{
    train.validate();
    const double z = std::max(cm.fn_cost(), cm.fp_cost());
    const double keep[2] = {cm.fp_cost() / z, cm.fn_cost() / z};

    for (int attempt = 0; attempt < kResampleRetries; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::size_t> kept;
        kept.reserve(train.rows());
        std::size_t kept_by_class[2] = {0, 0};
        for (std::size_t i = 0; i < train.rows(); ++i) {
            const int y = train.labels[i];
            if (unit(rng) < keep[y]) {
                kept.push_back(i);
                ++kept_by_class[y];
            }
        }
        if (kept_by_class[0] > 0 && kept_by_class[1] > 0) {
            return train.subset(kept);
        }
    }
    throw Error(ErrorCode::EmptyResample,
                "rejection sampling lost a class in " + std::to_string(kResampleRetries) + " attempts");
}

int min_cost_label(double p1, const CostMatrix& cm)
{
    const double cost_predict_0 = p1 * cm.fn_cost();
    const double cost_predict_1 = (1.0 - p1) * cm.fp_cost();
    return cost_predict_1 < cost_predict_0 ? 1 : 0;
}

MetacostResult metacost(const Dataset& train, const CostMatrix& cm, const Trainer& trainer,
                        std::uint64_t seed, const MetacostConfig& config)
{
    train.validate();
    if (config.replicates == 0) {
        throw Error(ErrorCode::InvalidArgument, "metacost needs at least one replicate");
    }
    const std::size_t n = train.rows();
    std::vector<std::vector<int>> votes(config.replicates);

    parallel_for(config.replicates, config.threads, [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(seed, r);
        for (int attempt = 0;; ++attempt) {
            if (attempt == kResampleRetries) {
                throw Error(ErrorCode::EmptyResample, "bootstrap replicate kept missing a class");
            }
            Rng rng(derive_seed(rep_seed, static_cast<std::uint64_t>(attempt)));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            std::vector<std::size_t> rows(n);
            for (auto& i : rows) {
                i = pick(rng);
            }
            Dataset sample = train.subset(rows);
            if (sample.count(0) == 0 || sample.count(1) == 0) {
                continue;
            }
            const Scorer model = trainer(sample);
            const double cut = null_threshold(model.type).threshold;
            const auto s = score(model, train.features);
            auto& v = votes[r];
            v.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = classify(s[i], cut);
            }
            return;
        }
    });

    MetacostResult result;
    result.prob_positive.assign(n, 0.0);
    result.relabeled.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ones = 0.0;
        for (const auto& v : votes) {
            ones += v[i];
        }
        result.prob_positive[i] = ones / double(config.replicates);
        result.relabeled[i] = min_cost_label(result.prob_positive[i], cm);
    }

    Dataset relabeled = train;
    relabeled.labels = result.relabeled;
    if (relabeled.count(0) == 0 || relabeled.count(1) == 0) {
        result.fell_back = true;
        relabeled.labels = train.labels;
    }
    result.scorer = trainer(relabeled);
    return result;
}

} // namespace thors
