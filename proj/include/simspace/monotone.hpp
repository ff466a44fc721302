#pragma once

#include <span>
#include <vector>

namespace simspace {

struct MonotoneFit {
  std::vector<double> fitted;  // nondecreasing, same length as the input
  double sse = 0.0;            // sum of w_i (value_i - fitted_i)^2
};

/// Weighted least-squares nondecreasing fit (pool adjacent violators).
/// Throws EmptyInput / NonpositiveWeight / DimensionMismatch.
MonotoneFit pava(std::span<const double> values, std::span<const double> weights);

/// Unit weights.
MonotoneFit pava(std::span<const double> values);

}  // namespace simspace
