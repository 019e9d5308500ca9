#pragma once

#include <span>
#include <vector>

namespace neuralrank {

/// 1-based ranks with ties assigned their average rank. Larger values get
/// smaller ranks when `descending` is set.
std::vector<double> average_ranks(std::span<const double> values, bool descending = true);

/// Pearson correlation of average ranks.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b, which corrects for ties in either variable.
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace neuralrank
