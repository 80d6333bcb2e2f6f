#include "thors/validation.hpp"

#include "thors/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thors {

LabeledScore::LabeledScore(double score_, int label_)
    : score(score_), label(label_)
{
    if (!std::isfinite(score_)) {
        throw Error(ErrorCode::NonFiniteScore, "score is not finite");
    }
    if (label_ != 0 && label_ != 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "label must be 0 or 1, got " + std::to_string(label_));
    }
}

ValidationScores ValidationScores::build(std::span<const LabeledScore> scores)
{
    ValidationScores vs;
    vs.sorted_.assign(scores.begin(), scores.end());
    for (const auto& s : vs.sorted_) {
        // members are public, so recheck
        if (!std::isfinite(s.score)) {
            throw Error(ErrorCode::NonFiniteScore, "score is not finite");
        }
        if (s.label == 1) {
            ++vs.n1_;
        } else {
            ++vs.n0_;
        }
    }
    if (vs.n0_ == 0 || vs.n1_ == 0) {
        throw Error(ErrorCode::MissingClass,
                    "validation scores need both classes (n0=" + std::to_string(vs.n0_) +
                        ", n1=" + std::to_string(vs.n1_) + ")");
    }

    std::stable_sort(vs.sorted_.begin(), vs.sorted_.end(),
                     [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });

    vs.prefix0_.resize(vs.sorted_.size() + 1);
    vs.prefix0_[0] = 0;
    for (std::size_t i = 0; i < vs.sorted_.size(); ++i) {
        vs.prefix0_[i + 1] = vs.prefix0_[i] + (vs.sorted_[i].label == 0 ? 1 : 0);
    }
    return vs;
}

std::size_t ValidationScores::rank_at_or_below(double threshold) const
{
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), threshold,
                               [](double t, const LabeledScore& s) { return t < s.score; });
    return static_cast<std::size_t>(it - sorted_.begin());
}

std::size_t ValidationScores::count0_at_or_below(double threshold) const
{
    return prefix0_[rank_at_or_below(threshold)];
}

std::size_t ValidationScores::count1_at_or_below(double threshold) const
{
    const std::size_t r = rank_at_or_below(threshold);
    return r - prefix0_[r];
}

} // namespace thors
