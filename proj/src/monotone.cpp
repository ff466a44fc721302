#include "simspace/monotone.hpp"

#include "simspace/error.hpp"

#include <cmath>

namespace simspace {

namespace {

struct Block {
  double weighted_sum;
  double weight;
  std::size_t count;
  double mean() const { return weighted_sum / weight; }
};

MonotoneFit fit(std::span<const double> values, std::span<const double> weights, bool unit) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "pava needs at least one value");
  if (!unit && weights.size() != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "pava weights and values differ in length");
  }

  std::vector<Block> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = unit ? 1.0 : weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::NonpositiveWeight, "weight " + std::to_string(i) + " is not positive");
    }
    stack.push_back({w * values[i], w, 1});
    // Merge while the last two blocks violate the ordering.
    while (stack.size() > 1 && stack[stack.size() - 2].mean() > stack.back().mean()) {
      const Block top = stack.back();
      stack.pop_back();
      stack.back().weighted_sum += top.weighted_sum;
      stack.back().weight += top.weight;
      stack.back().count += top.count;
    }
  }

  MonotoneFit result;
  result.fitted.reserve(values.size());
  for (const auto& block : stack) result.fitted.insert(result.fitted.end(), block.count, block.mean());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = values[i] - result.fitted[i];
    result.sse += (unit ? 1.0 : weights[i]) * r * r;
  }
  return result;
}

}  // namespace

MonotoneFit pava(std::span<const double> values, std::span<const double> weights) {
  return fit(values, weights, false);
}

MonotoneFit pava(std::span<const double> values) { return fit(values, {}, true); }

}  // namespace simspace
