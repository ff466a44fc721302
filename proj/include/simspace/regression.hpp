#pragma once

#include "simspace/data_model.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simspace {

/// f_d(x) = intercept_d + sum_k weights(k, d) x_k for every target dimension d.
struct LinearModel {
  Eigen::VectorXd intercept;  // t
  Eigen::MatrixXd weights;    // K x t

  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const;
};

/// Ordinary least squares per target dimension with an unpenalized
/// intercept; rank-deficient systems get the minimum-norm weights.
LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets);

struct LassoOptions {
  double tolerance = 1e-7;  // max |weight change| per sweep
  int max_sweeps = 10000;
};

/// Minimizes, per target dimension d,
///   (1/N) sum_i (y_d - f_d)^2 + (beta / K) sum_k |w_k^(d)|
/// by cyclic coordinate descent with soft-thresholding. beta = 0 is
/// ordinary least squares.
LinearModel fit_lasso(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, double beta,
                      const LassoOptions& options = {});

/// Predicts the origin for every row.
Eigen::MatrixXd zero_baseline_predict(Eigen::Index rows, Eigen::Index dims);

struct Metrics {
  double mse = 0.0;        // sum over dimensions of the per-dimension mean squared error
  double med = 0.0;        // mean Euclidean distance between prediction and target
  double r_squared = 0.0;  // mean over dimensions of 1 - S_residual / S_total
};

/// Throws ShapeMismatch for different shapes or fewer than two rows.
Metrics evaluate(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

enum class RegressorKind { zero_baseline, linear, lasso };

const char* to_string(RegressorKind kind) noexcept;
RegressorKind parse_regressor_kind(std::string_view text);

struct RegressorSpec {
  RegressorKind kind = RegressorKind::linear;
  double beta = 0.0;  // lasso only

  void validate() const;
};

const std::vector<double>& default_beta_grid();

struct EvaluationReport {
  RegressorSpec regressor;
  std::string feature_space = "features";
  std::string target_space = "targets";
  bool shuffled = false;
  Metrics train;  // mean over folds of the in-fold training evaluation
  Metrics test;   // on the concatenated held-out predictions
  // Oriented so that values above 1 mean overfitting: test/train for MSE and
  // MED, train/test for R^2.
  Metrics overfitting;
};

/// Cross-validation over groups of rows: every fold holds all rows of
/// groups/folds original stimuli. Groups are sorted lexicographically, then
/// shuffled with the seed, then cut into consecutive folds.
class GroupedCrossValidation {
 public:
  GroupedCrossValidation(const FeatureMatrix& features, const TargetAssignment& assignment, int folds,
                         std::uint64_t seed);

  EvaluationReport run(const RegressorSpec& spec) const;

  /// Held-out predictions from the most recent run(), one per input row.
  const Eigen::MatrixXd& last_test_predictions() const noexcept { return last_predictions_; }

  const std::vector<int>& fold_of_row() const noexcept { return fold_of_row_; }
  int folds() const noexcept { return folds_; }

 private:
  struct Moments {
    double n = 0.0;
    Eigen::VectorXd sum_x;
    Eigen::VectorXd sum_y;
    Eigen::MatrixXd gram;
    Eigen::MatrixXd cross;
  };

  LinearModel fit(const Moments& train, const RegressorSpec& spec) const;

  Eigen::MatrixXd features_;  // shifted by the column means
  Eigen::MatrixXd targets_;   // shifted by the column means
  Eigen::RowVectorXd feature_shift_;
  Eigen::RowVectorXd target_shift_;
  Eigen::MatrixXd raw_targets_;
  bool shuffled_ = false;
  int folds_ = 0;
  std::vector<int> fold_of_row_;
  std::vector<Moments> train_moments_;
  mutable Eigen::MatrixXd last_predictions_;
};

EvaluationReport grouped_cross_validation(const FeatureMatrix& features, const TargetAssignment& assignment,
                                          const RegressorSpec& spec, int folds, std::uint64_t seed);

/// Seed value that leaves the mapping unchanged (while still flagging it as
/// shuffled).
inline constexpr std::uint64_t kIdentityShuffleSeed = std::numeric_limits<std::uint64_t>::max();

/// Applies a seeded uniform permutation to the group -> point mapping.
TargetAssignment shuffle_targets(const TargetAssignment& assignment, std::uint64_t seed);

struct BetaSweep {
  std::vector<EvaluationReport> reports;  // one per grid entry, in grid order
  std::vector<bool> best;                 // within 1e-6 of the lowest test MSE
};

BetaSweep beta_sweep(const FeatureMatrix& features, const TargetAssignment& assignment,
                     const std::vector<double>& beta_grid, int folds, std::uint64_t seed);

/// Flags every report whose test MSE is within 1e-6 of the lowest.
std::vector<bool> flag_best(const std::vector<EvaluationReport>& reports);

/// Columns: regressor,feature_space,target_space,shuffled,beta,mse_test,
/// med_test,r2_test,overfit_mse,overfit_med,overfit_r2,mse_train,med_train,
/// r2_train,best
void save_report_csv(const std::vector<EvaluationReport>& reports, const std::vector<bool>& best,
                     const std::filesystem::path& path);

}  // namespace simspace
