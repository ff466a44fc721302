#pragma once

#include "simspace/data_model.hpp"
#include "simspace/rng.hpp"

#include <string>
#include <vector>

namespace synthetic {

inline std::vector<std::string> labels(std::size_t n, const std::string& prefix = "s") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

/// n points uniform in [-1, 1]^t.
inline Eigen::MatrixXd uniform_points(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
  simspace::Rng rng(seed);
  Eigen::MatrixXd x(n, t);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < t; ++d) x(i, d) = rng.uniform(-1.0, 1.0);
  return x;
}

inline simspace::DissimilarityMatrix euclidean(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd d(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
  return {labels(static_cast<std::size_t>(x.rows())), d};
}

/// Symmetric matrix with entries uniform in (0.1, 1.1).
inline simspace::DissimilarityMatrix random_dissimilarity(Eigen::Index n, std::uint64_t seed) {
  simspace::Rng rng(seed);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = 0.1 + rng.uniform();
  return {labels(static_cast<std::size_t>(n)), d};
}

struct GroupedData {
  simspace::FeatureMatrix features;
  simspace::Configuration targets;  // one point per group
};

/// `groups` stimuli with `replicates` rows each. The first `informative`
/// columns carry a per-group signal plus small per-row noise; the remaining
/// columns are per-row noise. Targets are a fixed linear map of the group
/// signal plus target noise.
inline GroupedData grouped_linear(std::size_t groups, std::size_t replicates, Eigen::Index features,
                                  Eigen::Index informative, Eigen::Index dims, double row_noise,
                                  double target_noise, std::uint64_t seed) {
  simspace::Rng rng(seed);
  Eigen::MatrixXd signal(static_cast<Eigen::Index>(groups), informative);
  for (Eigen::Index g = 0; g < signal.rows(); ++g)
    for (Eigen::Index k = 0; k < informative; ++k) signal(g, k) = rng.normal();
  Eigen::MatrixXd map(informative, dims);
  for (Eigen::Index k = 0; k < informative; ++k)
    for (Eigen::Index d = 0; d < dims; ++d) map(k, d) = rng.normal();
  Eigen::MatrixXd points = signal * map;
  for (Eigen::Index g = 0; g < points.rows(); ++g)
    for (Eigen::Index d = 0; d < dims; ++d) points(g, d) += target_noise * rng.normal();

  const auto group_labels = labels(groups, "g");
  std::vector<std::string> sample_ids, group_ids;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(groups * replicates), features);
  Eigen::Index row = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t r = 0; r < replicates; ++r, ++row) {
      sample_ids.push_back(group_labels[g] + "_" + std::to_string(r));
      group_ids.push_back(group_labels[g]);
      for (Eigen::Index k = 0; k < features; ++k) {
        const double base = k < informative ? signal(static_cast<Eigen::Index>(g), k) : 0.0;
        x(row, k) = base + (k < informative ? row_noise : 1.0) * rng.normal();
      }
    }
  }
  return {simspace::FeatureMatrix(sample_ids, group_ids, x), simspace::Configuration(group_labels, points)};
}

}  // namespace synthetic
