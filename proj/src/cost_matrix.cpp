#include "thors/cost_matrix.hpp"

#include "thors/error.hpp"

#include <cmath>
#include <string>

namespace thors {

CostMatrix::CostMatrix(double fn_cost, double fp_cost)
    : fn_cost_(fn_cost), fp_cost_(fp_cost)
{
    if (!std::isfinite(fn_cost) || !(fn_cost > 0.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "fn_cost must be finite and positive, got " + std::to_string(fn_cost));
    }
    if (!std::isfinite(fp_cost) || !(fp_cost > 0.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "fp_cost must be finite and positive, got " + std::to_string(fp_cost));
    }
}

double CostMatrix::cost(int actual, int predicted) const noexcept
{
    if (actual == predicted) {
        return 0.0;
    }
    return actual == 1 ? fn_cost_ : fp_cost_;
}

} // namespace thors
