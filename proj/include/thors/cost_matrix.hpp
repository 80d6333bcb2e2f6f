#pragma once

namespace thors {

/// Binary cost matrix C(actual, predicted) with a zero diagonal.
///
/// The false-negative cost C(1,0) is the unit the guarantees are expressed in;
/// beta() = C(0,1) / C(1,0) is the relative price of a false positive.
class CostMatrix {
public:
    /// Throws Error(InvalidArgument) unless both costs are finite and > 0.
    CostMatrix(double fn_cost, double fp_cost);

    double fn_cost() const noexcept { return fn_cost_; }
    double fp_cost() const noexcept { return fp_cost_; }
    double beta() const noexcept { return fp_cost_ / fn_cost_; }

    /// The usual setting has beta < 1 (false negatives dearer). Larger
    /// ratios are accepted but flagged.
    bool beta_warning() const noexcept { return beta() >= 1.0; }

    double cost(int actual, int predicted) const noexcept;

private:
    double fn_cost_;
    double fp_cost_;
};

} // namespace thors
