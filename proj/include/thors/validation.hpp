#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace thors {

/// A classifier score paired with its true class (1 = positive).
struct LabeledScore {
    double score;
    int label;

    /// Throws Error(NonFiniteScore) for NaN/inf and Error(InvalidArgument)
    /// for labels outside {0, 1}.
    LabeledScore(double score, int label);
};

/// Validation scores sorted ascending (stable w.r.t. input order), with class
/// counts and the prefix counts needed to evaluate any threshold by value.
class ValidationScores {
public:
    /// Throws Error(MissingClass) unless both classes are present and
    /// Error(NonFiniteScore) if any score is not finite.
    static ValidationScores build(std::span<const LabeledScore> scores);

    std::span<const LabeledScore> sorted() const noexcept { return sorted_; }
    std::size_t n0() const noexcept { return n0_; }
    std::size_t n1() const noexcept { return n1_; }
    std::size_t size() const noexcept { return sorted_.size(); }
    double pi0_hat() const noexcept { return double(n0_) / double(size()); }
    double pi1_hat() const noexcept { return double(n1_) / double(size()); }

    /// Number of class-0 / class-1 scores <= threshold.
    std::size_t count0_at_or_below(double threshold) const;
    std::size_t count1_at_or_below(double threshold) const;

private:
    ValidationScores() = default;
    std::size_t rank_at_or_below(double threshold) const;

    std::vector<LabeledScore> sorted_;
    // prefix0_[i] = number of class-0 among the first i sorted scores.
    std::vector<std::size_t> prefix0_;
    std::size_t n0_ = 0;
    std::size_t n1_ = 0;
};

} // namespace thors
