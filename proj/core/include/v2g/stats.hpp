#pragma once

#include <span>
#include <vector>

namespace v2g {

double mean(std::span<const double> xs);

// Population variance (divides by n). Defined as 0 for a single element.
double population_variance(std::span<const double> xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Least-squares fit y = a*x + b. When the data has no variance left to
// explain (SS_tot ~ 0) the fit is exact and r_squared is reported as 1.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Gini coefficient of a non-negative distribution; 0 for all-zero input.
double gini(std::span<const double> xs);

}  // namespace v2g
