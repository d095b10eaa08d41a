#pragma once

#include <cstddef>
#include <vector>

namespace dlo {

double mean(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);  // population std

/// Ranks with average tie handling (1-based fractional ranks).
std::vector<double> fractional_ranks(const std::vector<double>& xs);

/// Spearman rank correlation; NaN when either side is constant.
double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace dlo
