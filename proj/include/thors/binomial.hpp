#pragma once

#include <cstddef>

namespace thors {

/// log C(n, j) + j log x + (n - j) log(1 - x), for 0 < x < 1.
double log_binomial_pmf(std::size_t n, std::size_t j, double x);

/// P(Bin(n, x) >= j), summed in log space over whichever tail is shorter
/// in probability mass. Exact 0/1 for j > n / j == 0.
double binomial_upper_tail(std::size_t n, std::size_t j, double x);

} // namespace thors
