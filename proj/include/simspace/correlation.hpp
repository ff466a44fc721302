#pragma once

#include "simspace/data_model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace simspace {

enum class DistanceMetric { euclidean, manhattan, inner_product };

const char* to_string(DistanceMetric metric) noexcept;
DistanceMetric parse_distance_metric(std::string_view text);

struct DistanceSpec {
  DistanceMetric metric = DistanceMetric::euclidean;
  std::optional<std::vector<double>> weights;  // nonnegative, not all zero

  void validate(std::size_t features) const;
};

/// Distance between two feature vectors. The inner product variant returns
/// the raw (possibly negative) value -sum w_k u_k v_k.
double pair_distance(std::span<const double> u, std::span<const double> v, const DistanceSpec& spec);

struct PairwiseDistances {
  DissimilarityMatrix matrix;
  // Added to every off-diagonal entry so that the negated inner product is
  // nonnegative; 0 for euclidean and manhattan.
  double shift = 0.0;
};

PairwiseDistances pairwise_distances(const Representation& rep, const DistanceSpec& spec);

/// Pearson product-moment correlation. Throws ConstantInput when either
/// vector has zero variance, DimensionMismatch on length mismatch or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

/// Mid-ranks (1-based); tied values share the mean of their rank range.
std::vector<double> fractional_ranks(std::span<const double> values);

/// Pearson on fractional ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct DistanceWeightFit {
  std::vector<double> weights;         // refit on all pairs
  std::vector<double> cv_predictions;  // held-out predicted distances, pair order
  double residual_norm = 0.0;          // in-sample NNLS residual of the final fit
  bool degenerate = false;             // every weight is zero
};

/// Per-dimension nonnegative weights for `metric`, fitted by NNLS with
/// `folds`-fold cross-validation over stimulus pairs. `rep` must carry the
/// same labels as `delta` (in any order).
///   euclidean:     sum_k w_k (u_k - v_k)^2  ~ delta^2
///   manhattan:     sum_k w_k |u_k - v_k|    ~ delta
///   inner_product: sum_k w_k u_k v_k        ~ -delta
DistanceWeightFit fit_distance_weights(const Representation& rep, DistanceMetric metric,
                                       const DissimilarityMatrix& delta, int folds, std::uint64_t seed);

enum class Weighting { none, nnls };

const char* to_string(Weighting weighting) noexcept;

struct CorrelationReport {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n_pairs = 0;
  DistanceMetric metric = DistanceMetric::euclidean;
  bool weighted = false;
  bool degenerate_weights = false;
};

/// With weighting nnls, constant held-out predictions (all weights zero)
/// leave both coefficients at 0 and set degenerate_weights.
CorrelationReport correlation_analysis(const Representation& rep, const DissimilarityMatrix& delta,
                                       DistanceMetric metric, Weighting weighting, int folds,
                                       std::uint64_t seed);

}  // namespace simspace
