#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace simspace {

/// Symmetric n x n matrix of pairwise stimulus dissimilarities with a zero
/// diagonal and nonnegative finite entries. Rows and columns follow labels().
class DissimilarityMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;

  /// Validates the invariants. Asymmetries up to kSymmetryTolerance are
  /// averaged away; larger ones throw AsymmetricMatrix.
  DissimilarityMatrix(std::vector<std::string> labels, Eigen::MatrixXd values);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

  std::optional<std::size_t> index_of(const std::string& label) const;

  /// Entries strictly above the diagonal in row-major order:
  /// (0,1), (0,2), ..., (0,n-1), (1,2), ...
  std::vector<double> upper_triangle() const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd values_;
  std::map<std::string, std::size_t> index_;
};

/// n points in a t-dimensional space.
class Configuration {
 public:
  Configuration(std::vector<std::string> labels, Eigen::MatrixXd coords);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(coords_.cols()); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Eigen::MatrixXd& coords() const noexcept { return coords_; }

  /// Rows permuted into the order of `labels`; throws LabelMismatch unless
  /// the two label sets are identical.
  Configuration aligned_to(const std::vector<std::string>& labels) const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd coords_;
};

/// Feature vectors, one row per sample. group_ids name the original
/// stimulus each (possibly augmented) sample derives from.
class FeatureMatrix {
 public:
  FeatureMatrix(std::vector<std::string> sample_ids, std::vector<std::string> group_ids,
                Eigen::MatrixXd values);

  std::size_t rows() const noexcept { return sample_ids_.size(); }
  std::size_t features() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& group_ids() const noexcept { return group_ids_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  /// Distinct group ids in lexicographic order.
  std::vector<std::string> groups() const;

 private:
  std::vector<std::string> sample_ids_;
  std::vector<std::string> group_ids_;
  Eigen::MatrixXd values_;
};

/// Labelled rows for distance computations: either configuration points or
/// one feature vector per stimulus.
struct Representation {
  std::vector<std::string> labels;
  Eigen::MatrixXd rows;

  static Representation from(const Configuration& config);
  static Representation from(const FeatureMatrix& features);

  /// Rows reordered to `labels`; throws LabelMismatch on any difference.
  Representation aligned_to(const std::vector<std::string>& target_labels) const;
};

/// Regression targets: every group id maps to one point of a target space.
class TargetAssignment {
 public:
  TargetAssignment(std::map<std::string, Eigen::VectorXd> points, bool shuffled);

  static TargetAssignment from_configuration(const Configuration& config);

  std::size_t dims() const noexcept { return dims_; }
  bool shuffled() const noexcept { return shuffled_; }
  const std::map<std::string, Eigen::VectorXd>& points() const noexcept { return points_; }

  /// Throws LabelMismatch if the group has no target.
  const Eigen::VectorXd& point(const std::string& group_id) const;

  /// One target row per feature row.
  Eigen::MatrixXd targets_for(const FeatureMatrix& features) const;

 private:
  std::map<std::string, Eigen::VectorXd> points_;
  std::size_t dims_ = 0;
  bool shuffled_ = false;
};

/// Centers every dimension and applies one scale factor so that the mean
/// squared norm of the points is 1.
Configuration normalize_configuration(const Configuration& config);

DissimilarityMatrix load_dissimilarity_csv(const std::filesystem::path& path);
void save_dissimilarity_csv(const DissimilarityMatrix& matrix, const std::filesystem::path& path);

Configuration load_configuration_csv(const std::filesystem::path& path);
void save_configuration_csv(const Configuration& config, const std::filesystem::path& path);

/// Header `sample_id,group_id,f_1,...,f_k`. Lines starting with '#' are
/// comments (the feature extractor records its checkpoint there).
FeatureMatrix load_feature_csv(const std::filesystem::path& path);
void save_feature_csv(const FeatureMatrix& features, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace simspace
