#include "simspace/regression.hpp"

#include "simspace/csv.hpp"
#include "simspace/error.hpp"
#include "simspace/parallel.hpp"
#include "simspace/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace simspace {

namespace {

// Minimum-norm solution of gram * W = cross through the pseudo-inverse of
// the (symmetric, positive semidefinite) centered Gram matrix.
Eigen::MatrixXd solve_min_norm(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross) {
  if (gram.rows() == 0) return Eigen::MatrixXd::Zero(0, cross.cols());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = std::max(values.maxCoeff(), 0.0);
  const double cutoff = 4.0 * static_cast<double>(gram.rows()) * std::numeric_limits<double>::epsilon() * largest;
  Eigen::VectorXd inverse(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) inverse(i) = values(i) > cutoff && values(i) > 0.0 ? 1.0 / values(i) : 0.0;
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * (inverse.asDiagonal() * (v.transpose() * cross));
}

double soft_threshold(double z, double threshold) {
  if (z > threshold) return z - threshold;
  if (z < -threshold) return z + threshold;
  return 0.0;
}

// Coordinate descent on  w^T A w - 2 b^T w + lambda |w|_1  for each column of b,
// where A = centered Gram / N and b = centered cross products / N.
Eigen::MatrixXd solve_lasso(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda,
                            const LassoOptions& options) {
  const Eigen::Index k = a.rows();
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(k, b.cols());
  if (k == 0) return weights;
  const double diag_floor = std::numeric_limits<double>::epsilon() * std::max(a.diagonal().maxCoeff(), 0.0);
  const double half_lambda = 0.5 * lambda;

  for (Eigen::Index d = 0; d < b.cols(); ++d) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd residual = b.col(d);  // b - A w
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      double max_change = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        const double ajj = a(j, j);
        if (ajj <= diag_floor) continue;
        const double z = residual(j) + ajj * w(j);
        const double updated = soft_threshold(z, half_lambda) / ajj;
        const double change = updated - w(j);
        if (change != 0.0) {
          residual.noalias() -= change * a.col(j);
          w(j) = updated;
          max_change = std::max(max_change, std::abs(change));
        }
      }
      if (max_change < options.tolerance) break;
    }
    weights.col(d) = w;
  }
  return weights;
}

void check_training_shapes(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets) {
  if (features.rows() == 0) throw Error(ErrorKind::EmptyTrainingSet, "no training rows");
  if (targets.rows() != features.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "features and targets have different row counts");
  }
  if (!features.allFinite() || !targets.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "training data must be finite");
  }
}

template <typename Solver>
LinearModel fit_centered(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, Solver&& solve) {
  check_training_shapes(features, targets);
  const Eigen::RowVectorXd x_mean = features.colwise().mean();
  const Eigen::RowVectorXd y_mean = targets.colwise().mean();
  const Eigen::MatrixXd xc = features.rowwise() - x_mean;
  const Eigen::MatrixXd yc = targets.rowwise() - y_mean;
  const Eigen::MatrixXd gram = xc.transpose() * xc;
  const Eigen::MatrixXd cross = xc.transpose() * yc;
  LinearModel model;
  model.weights = solve(gram, cross, static_cast<double>(features.rows()));
  model.intercept = (y_mean - x_mean * model.weights).transpose();
  return model;
}

}  // namespace

Eigen::MatrixXd LinearModel::predict(const Eigen::MatrixXd& features) const {
  if (features.cols() != weights.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "model expects " + std::to_string(weights.rows()) + " features");
  }
  Eigen::MatrixXd out = features * weights;
  out.rowwise() += intercept.transpose();
  return out;
}

LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets) {
  return fit_centered(features, targets,
                      [](const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double) { return solve_min_norm(gram, cross); });
}

LinearModel fit_lasso(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, double beta,
                      const LassoOptions& options) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidArgument, "beta must be finite and >= 0");
  const double lambda = features.cols() > 0 ? beta / static_cast<double>(features.cols()) : 0.0;
  return fit_centered(features, targets, [&](const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double n) {
    return solve_lasso(gram / n, cross / n, lambda, options);
  });
}

Eigen::MatrixXd zero_baseline_predict(Eigen::Index rows, Eigen::Index dims) {
  return Eigen::MatrixXd::Zero(rows, dims);
}

Metrics evaluate(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "predictions and targets have different shapes");
  }
  if (targets.rows() < 2 || targets.cols() < 1) throw Error(ErrorKind::ShapeMismatch, "evaluation needs at least two rows");
  const auto n = static_cast<double>(targets.rows());
  const Eigen::MatrixXd errors = targets - predictions;

  Metrics m;
  m.mse = errors.squaredNorm() / n;
  m.med = errors.rowwise().norm().sum() / n;
  const Eigen::RowVectorXd mean = targets.colwise().mean();
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < targets.cols(); ++d) {
    const double residual = errors.col(d).squaredNorm();
    const double total = (targets.col(d).array() - mean(d)).square().sum();
    r2 += total > 0.0 ? 1.0 - residual / total : (residual == 0.0 ? 1.0 : 0.0);
  }
  m.r_squared = r2 / static_cast<double>(targets.cols());
  return m;
}

const char* to_string(RegressorKind kind) noexcept {
  switch (kind) {
    case RegressorKind::zero_baseline: return "baseline";
    case RegressorKind::linear: return "linear";
    case RegressorKind::lasso: return "lasso";
  }
  return "unknown";
}

RegressorKind parse_regressor_kind(std::string_view text) {
  if (text == "baseline" || text == "zero_baseline") return RegressorKind::zero_baseline;
  if (text == "linear") return RegressorKind::linear;
  if (text == "lasso") return RegressorKind::lasso;
  throw Error(ErrorKind::InvalidArgument, "unknown regressor '" + std::string(text) + "'");
}

void RegressorSpec::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidArgument, "beta must be finite and >= 0");
}

const std::vector<double>& default_beta_grid() {
  static const std::vector<double> grid{0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05,
                                        0.1, 0.2,   0.5,   1.0,   2.0,  5.0,  10.0};
  return grid;
}

// ---------------------------------------------------------------------------

GroupedCrossValidation::GroupedCrossValidation(const FeatureMatrix& features, const TargetAssignment& assignment,
                                               int folds, std::uint64_t seed)
    : shuffled_(assignment.shuffled()), folds_(folds) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "cross-validation needs at least two folds");
  if (features.rows() == 0) throw Error(ErrorKind::EmptyTrainingSet, "no feature rows");

  std::vector<std::string> groups = features.groups();
  if (groups.size() % static_cast<std::size_t>(folds) != 0) {
    throw Error(ErrorKind::IndivisibleGroups, std::to_string(groups.size()) + " groups cannot be split into " +
                                                  std::to_string(folds) + " equal folds");
  }
  std::map<std::string, std::size_t> replicates;
  for (const auto& g : features.group_ids()) ++replicates[g];
  for (const auto& [group, count] : replicates) {
    if (count != replicates.begin()->second) {
      throw Error(ErrorKind::IndivisibleGroups, "group '" + group + "' has " + std::to_string(count) +
                                                    " rows; every group needs the same replicate count");
    }
  }

  auto rng = Rng::stream(seed, "group-folds", 0);
  rng.shuffle(std::span<std::string>(groups));
  std::map<std::string, int> fold_of_group;
  const std::size_t per_fold = groups.size() / static_cast<std::size_t>(folds);
  for (std::size_t i = 0; i < groups.size(); ++i) fold_of_group[groups[i]] = static_cast<int>(i / per_fold);

  fold_of_row_.resize(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) fold_of_row_[r] = fold_of_group.at(features.group_ids()[r]);

  raw_targets_ = assignment.targets_for(features);
  feature_shift_ = features.values().colwise().mean();
  target_shift_ = raw_targets_.colwise().mean();
  features_ = features.values().rowwise() - feature_shift_;
  targets_ = raw_targets_.rowwise() - target_shift_;

  const Eigen::Index k = features_.cols();
  const Eigen::Index t = targets_.cols();
  std::vector<Moments> fold_moments(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> rows;
    for (std::size_t r = 0; r < fold_of_row_.size(); ++r)
      if (fold_of_row_[r] == f) rows.push_back(static_cast<Eigen::Index>(r));
    const Eigen::MatrixXd x = features_(rows, Eigen::all);
    const Eigen::MatrixXd y = targets_(rows, Eigen::all);
    Moments& m = fold_moments[static_cast<std::size_t>(f)];
    m.n = static_cast<double>(rows.size());
    m.sum_x = x.colwise().sum().transpose();
    m.sum_y = y.colwise().sum().transpose();
    m.gram = Eigen::MatrixXd::Zero(k, k);
    m.gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    m.gram = m.gram.selfadjointView<Eigen::Lower>();
    m.cross = x.transpose() * y;
  }

  Moments total{0.0, Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(t), Eigen::MatrixXd::Zero(k, k),
                Eigen::MatrixXd::Zero(k, t)};
  for (const auto& m : fold_moments) {
    total.n += m.n;
    total.sum_x += m.sum_x;
    total.sum_y += m.sum_y;
    total.gram += m.gram;
    total.cross += m.cross;
  }
  for (const auto& m : fold_moments) {
    train_moments_.push_back(Moments{total.n - m.n, total.sum_x - m.sum_x, total.sum_y - m.sum_y,
                                     total.gram - m.gram, total.cross - m.cross});
  }
}

LinearModel GroupedCrossValidation::fit(const Moments& train, const RegressorSpec& spec) const {
  if (train.n <= 0.0) throw Error(ErrorKind::EmptyTrainingSet, "training fold is empty");
  const Eigen::VectorXd x_mean = train.sum_x / train.n;
  const Eigen::VectorXd y_mean = train.sum_y / train.n;
  Eigen::MatrixXd gram = train.gram - train.n * x_mean * x_mean.transpose();
  const Eigen::MatrixXd cross = train.cross - train.n * x_mean * y_mean.transpose();
  gram = 0.5 * (gram + gram.transpose());

  LinearModel model;
  if (spec.kind == RegressorKind::lasso) {
    const double lambda = gram.rows() > 0 ? spec.beta / static_cast<double>(gram.rows()) : 0.0;
    model.weights = solve_lasso(gram / train.n, cross / train.n, lambda, LassoOptions{});
  } else {
    model.weights = solve_min_norm(gram, cross);
  }
  // Intercept in the shifted coordinates of features_ / targets_.
  model.intercept = y_mean - model.weights.transpose() * x_mean;
  return model;
}

EvaluationReport GroupedCrossValidation::run(const RegressorSpec& spec) const {
  spec.validate();
  EvaluationReport report;
  report.regressor = spec;
  report.shuffled = shuffled_;
  const Eigen::Index n = features_.rows();
  const Eigen::Index t = targets_.cols();

  if (spec.kind == RegressorKind::zero_baseline) {
    // Nothing is learned, so training and held-out performance coincide.
    last_predictions_ = zero_baseline_predict(n, t);
    report.test = evaluate(last_predictions_, raw_targets_);
    report.train = report.test;
    report.overfitting = Metrics{1.0, 1.0, 1.0};
    return report;
  }

  const auto fold_count = static_cast<std::size_t>(folds_);
  std::vector<Metrics> train_metrics(fold_count);
  std::vector<Eigen::MatrixXd> fold_predictions(fold_count);
  parallel_for(fold_count, [&](std::size_t f) {
    const LinearModel model = fit(train_moments_[f], spec);
    Eigen::MatrixXd predictions = features_ * model.weights;
    predictions.rowwise() += model.intercept.transpose() + target_shift_;
    std::vector<Eigen::Index> train_rows;
    for (Eigen::Index r = 0; r < n; ++r)
      if (fold_of_row_[static_cast<std::size_t>(r)] != static_cast<int>(f)) train_rows.push_back(r);
    train_metrics[f] = evaluate(predictions(train_rows, Eigen::all), raw_targets_(train_rows, Eigen::all));
    fold_predictions[f] = std::move(predictions);
  });

  last_predictions_.resize(n, t);
  for (Eigen::Index r = 0; r < n; ++r) {
    last_predictions_.row(r) = fold_predictions[static_cast<std::size_t>(fold_of_row_[static_cast<std::size_t>(r)])].row(r);
  }
  report.test = evaluate(last_predictions_, raw_targets_);
  for (const auto& m : train_metrics) {
    report.train.mse += m.mse / static_cast<double>(fold_count);
    report.train.med += m.med / static_cast<double>(fold_count);
    report.train.r_squared += m.r_squared / static_cast<double>(fold_count);
  }
  report.overfitting.mse = report.test.mse / report.train.mse;
  report.overfitting.med = report.test.med / report.train.med;
  report.overfitting.r_squared = report.train.r_squared / report.test.r_squared;
  return report;
}

EvaluationReport grouped_cross_validation(const FeatureMatrix& features, const TargetAssignment& assignment,
                                          const RegressorSpec& spec, int folds, std::uint64_t seed) {
  return GroupedCrossValidation(features, assignment, folds, seed).run(spec);
}

TargetAssignment shuffle_targets(const TargetAssignment& assignment, std::uint64_t seed) {
  std::vector<std::string> keys;
  std::vector<Eigen::VectorXd> points;
  for (const auto& [group, point] : assignment.points()) {
    keys.push_back(group);
    points.push_back(point);
  }
  if (seed != kIdentityShuffleSeed) {
    auto rng = Rng::stream(seed, "targets", 0);
    rng.shuffle(std::span<Eigen::VectorXd>(points));
  }
  std::map<std::string, Eigen::VectorXd> mapping;
  for (std::size_t i = 0; i < keys.size(); ++i) mapping.emplace(keys[i], points[i]);
  return TargetAssignment(std::move(mapping), true);
}

std::vector<bool> flag_best(const std::vector<EvaluationReport>& reports) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) lowest = std::min(lowest, r.test.mse);
  std::vector<bool> best;
  for (const auto& r : reports) best.push_back(r.test.mse <= lowest + 1e-6);
  return best;
}

BetaSweep beta_sweep(const FeatureMatrix& features, const TargetAssignment& assignment,
                     const std::vector<double>& beta_grid, int folds, std::uint64_t seed) {
  if (beta_grid.empty()) throw Error(ErrorKind::InvalidArgument, "beta grid is empty");
  const GroupedCrossValidation cv(features, assignment, folds, seed);
  BetaSweep sweep;
  for (double beta : beta_grid) sweep.reports.push_back(cv.run(RegressorSpec{RegressorKind::lasso, beta}));
  sweep.best = flag_best(sweep.reports);
  return sweep;
}

void save_report_csv(const std::vector<EvaluationReport>& reports, const std::vector<bool>& best,
                     const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "regressor,feature_space,target_space,shuffled,beta,mse_test,med_test,r2_test,overfit_mse,"
         "overfit_med,overfit_r2,mse_train,med_train,r2_train,best\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out << to_string(r.regressor.kind) << ',' << r.feature_space << ',' << r.target_space << ','
        << (r.shuffled ? "shuffled" : "correct") << ','
        << (r.regressor.kind == RegressorKind::lasso ? format_double(r.regressor.beta) : std::string()) << ','
        << format_double(r.test.mse) << ',' << format_double(r.test.med) << ',' << format_double(r.test.r_squared)
        << ',' << format_double(r.overfitting.mse) << ',' << format_double(r.overfitting.med) << ','
        << format_double(r.overfitting.r_squared) << ',' << format_double(r.train.mse) << ','
        << format_double(r.train.med) << ',' << format_double(r.train.r_squared) << ','
        << (i < best.size() && best[i] ? 1 : 0) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace simspace
