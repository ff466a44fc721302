#include "simspace/data_model.hpp"

#include "simspace/csv.hpp"
#include "simspace/error.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace simspace {

namespace {

std::map<std::string, std::size_t> unique_index(const std::vector<std::string>& labels,
                                                const char* what) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      throw Error(ErrorKind::DuplicateLabel, std::string(what) + " label '" + labels[i] + "' repeated");
    }
  }
  return index;
}

Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& rows, const std::vector<std::string>& from,
                             const std::vector<std::string>& to) {
  if (from.size() != to.size()) {
    throw Error(ErrorKind::LabelMismatch, "label counts differ (" + std::to_string(from.size()) +
                                              " vs " + std::to_string(to.size()) + ")");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < from.size(); ++i) index.emplace(from[i], i);
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < to.size(); ++i) {
    const auto it = index.find(to[i]);
    if (it == index.end()) throw Error(ErrorKind::LabelMismatch, "label '" + to[i] + "' not present");
    out.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " contains non-finite values");
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

// ---------------------------------------------------------------------------

DissimilarityMatrix::DissimilarityMatrix(std::vector<std::string> labels, Eigen::MatrixXd values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (values_.rows() != n || values_.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "dissimilarity matrix must be " + std::to_string(n) +
                                                  "x" + std::to_string(n));
  }
  index_ = unique_index(labels_, "dissimilarity");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(values_(i, i)) || values_(i, i) != 0.0) {
      throw Error(ErrorKind::NonzeroDiagonal, "entry (" + labels_[i] + "," + labels_[i] + ") is " +
                                                  format_double(values_(i, i)));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw Error(ErrorKind::InvalidArgument, "non-finite dissimilarity between " + labels_[i] +
                                                    " and " + labels_[j]);
      }
      if (a < 0.0 || b < 0.0) {
        throw Error(ErrorKind::NegativeEntry, "negative dissimilarity between " + labels_[i] +
                                                  " and " + labels_[j]);
      }
      if (std::abs(a - b) > kSymmetryTolerance) {
        throw Error(ErrorKind::AsymmetricMatrix, "entries (" + labels_[i] + "," + labels_[j] +
                                                     ") differ by " + format_double(std::abs(a - b)));
      }
      const double mean = 0.5 * (a + b);
      values_(i, j) = mean;
      values_(j, i) = mean;
    }
  }
}

std::optional<std::size_t> DissimilarityMatrix::index_of(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> DissimilarityMatrix::upper_triangle() const {
  const auto n = values_.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out.push_back(values_(i, j));
  return out;
}

// ---------------------------------------------------------------------------

Configuration::Configuration(std::vector<std::string> labels, Eigen::MatrixXd coords)
    : labels_(std::move(labels)), coords_(std::move(coords)) {
  if (coords_.rows() != static_cast<Eigen::Index>(labels_.size())) {
    throw Error(ErrorKind::DimensionMismatch, "configuration has " + std::to_string(coords_.rows()) +
                                                  " rows but " + std::to_string(labels_.size()) + " labels");
  }
  if (coords_.cols() < 1) throw Error(ErrorKind::DimensionMismatch, "configuration needs at least one dimension");
  check_finite(coords_, "configuration");
  unique_index(labels_, "configuration");
}

Configuration Configuration::aligned_to(const std::vector<std::string>& labels) const {
  return Configuration(labels, permute_rows(coords_, labels_, labels));
}

// ---------------------------------------------------------------------------

FeatureMatrix::FeatureMatrix(std::vector<std::string> sample_ids, std::vector<std::string> group_ids,
                             Eigen::MatrixXd values)
    : sample_ids_(std::move(sample_ids)), group_ids_(std::move(group_ids)), values_(std::move(values)) {
  if (group_ids_.size() != sample_ids_.size() ||
      values_.rows() != static_cast<Eigen::Index>(sample_ids_.size())) {
    throw Error(ErrorKind::DimensionMismatch, "feature matrix rows, sample ids and group ids disagree");
  }
  check_finite(values_, "feature matrix");
  unique_index(sample_ids_, "sample");
}

std::vector<std::string> FeatureMatrix::groups() const {
  const std::set<std::string> unique(group_ids_.begin(), group_ids_.end());
  return {unique.begin(), unique.end()};
}

// ---------------------------------------------------------------------------

Representation Representation::from(const Configuration& config) {
  return {config.labels(), config.coords()};
}

Representation Representation::from(const FeatureMatrix& features) {
  return {features.sample_ids(), features.values()};
}

Representation Representation::aligned_to(const std::vector<std::string>& target_labels) const {
  return {target_labels, permute_rows(rows, labels, target_labels)};
}

// ---------------------------------------------------------------------------

TargetAssignment::TargetAssignment(std::map<std::string, Eigen::VectorXd> points, bool shuffled)
    : points_(std::move(points)), shuffled_(shuffled) {
  if (points_.empty()) throw Error(ErrorKind::EmptyInput, "target assignment has no points");
  dims_ = static_cast<std::size_t>(points_.begin()->second.size());
  for (const auto& [group, point] : points_) {
    if (static_cast<std::size_t>(point.size()) != dims_) {
      throw Error(ErrorKind::DimensionMismatch, "target for '" + group + "' has wrong dimensionality");
    }
    if (!point.allFinite()) throw Error(ErrorKind::InvalidArgument, "target for '" + group + "' is not finite");
  }
}

TargetAssignment TargetAssignment::from_configuration(const Configuration& config) {
  std::map<std::string, Eigen::VectorXd> points;
  for (std::size_t i = 0; i < config.size(); ++i) {
    points.emplace(config.labels()[i], config.coords().row(static_cast<Eigen::Index>(i)).transpose());
  }
  return TargetAssignment(std::move(points), false);
}

const Eigen::VectorXd& TargetAssignment::point(const std::string& group_id) const {
  const auto it = points_.find(group_id);
  if (it == points_.end()) throw Error(ErrorKind::LabelMismatch, "no target point for group '" + group_id + "'");
  return it->second;
}

Eigen::MatrixXd TargetAssignment::targets_for(const FeatureMatrix& features) const {
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(features.rows()), static_cast<Eigen::Index>(dims_));
  for (std::size_t i = 0; i < features.rows(); ++i) {
    targets.row(static_cast<Eigen::Index>(i)) = point(features.group_ids()[i]).transpose();
  }
  return targets;
}

// ---------------------------------------------------------------------------

Configuration normalize_configuration(const Configuration& config) {
  if (config.size() < 2) {
    throw Error(ErrorKind::DegenerateConfiguration, "normalization needs at least two points");
  }
  const Eigen::RowVectorXd mean = config.coords().colwise().mean();
  Eigen::MatrixXd centered = config.coords().rowwise() - mean;
  const double mean_sq_norm = centered.squaredNorm() / static_cast<double>(config.size());
  if (!(mean_sq_norm > 0.0)) {
    throw Error(ErrorKind::DegenerateConfiguration, "all points are identical");
  }
  centered /= std::sqrt(mean_sq_norm);
  return Configuration(config.labels(), std::move(centered));
}

// ---------------------------------------------------------------------------

DissimilarityMatrix load_dissimilarity_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 2) throw Error(ErrorKind::MalformedCsv, path.string() + ": header has no labels");
  const std::size_t n = table.header.size() - 1;
  if (table.rows.size() != n) {
    throw Error(ErrorKind::MalformedCsv, path.string() + ": expected " + std::to_string(n) +
                                             " data rows, found " + std::to_string(table.rows.size()));
  }
  std::vector<std::string> labels(table.header.begin() + 1, table.header.end());
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    if (row[0] != labels[i]) {
      throw Error(ErrorKind::MalformedCsv, path.string() + ": row " + std::to_string(i + 1) + " label '" +
                                               row[0] + "' does not match column label '" + labels[i] + "'");
    }
    for (std::size_t j = 0; j < n; ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = csv::parse_double(row[j + 1], i + 1, j + 1);
    }
  }
  return DissimilarityMatrix(std::move(labels), std::move(values));
}

void save_dissimilarity_csv(const DissimilarityMatrix& matrix, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "label";
  for (const auto& label : matrix.labels()) out << ',' << label;
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << matrix.labels()[i];
    for (std::size_t j = 0; j < matrix.size(); ++j) out << ',' << format_double(matrix(i, j));
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

Configuration load_configuration_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 2) throw Error(ErrorKind::MalformedCsv, path.string() + ": no coordinate columns");
  const std::size_t t = table.header.size() - 1;
  std::vector<std::string> labels;
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(t));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    labels.push_back(table.rows[i][0]);
    for (std::size_t d = 0; d < t; ++d) {
      coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
          csv::parse_double(table.rows[i][d + 1], i + 1, d + 1);
    }
  }
  return Configuration(std::move(labels), std::move(coords));
}

void save_configuration_csv(const Configuration& config, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "label";
  for (std::size_t d = 1; d <= config.dims(); ++d) out << ",dim_" << d;
  out << '\n';
  for (std::size_t i = 0; i < config.size(); ++i) {
    out << config.labels()[i];
    for (std::size_t d = 0; d < config.dims(); ++d) {
      out << ',' << format_double(config.coords()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

FeatureMatrix load_feature_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 3 || table.header[0] != "sample_id" || table.header[1] != "group_id") {
    throw Error(ErrorKind::MalformedCsv, path.string() + ": header must start with sample_id,group_id and name at least one feature");
  }
  if (table.rows.empty()) throw Error(ErrorKind::EmptyInput, path.string() + ": no feature rows");
  const std::size_t k = table.header.size() - 2;
  std::vector<std::string> samples;
  std::vector<std::string> groups;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    samples.push_back(table.rows[i][0]);
    groups.push_back(table.rows[i][1]);
    for (std::size_t f = 0; f < k; ++f) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) =
          csv::parse_double(table.rows[i][f + 2], i + 1, f + 2);
    }
  }
  return FeatureMatrix(std::move(samples), std::move(groups), std::move(values));
}

void save_feature_csv(const FeatureMatrix& features, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "sample_id,group_id";
  for (std::size_t f = 1; f <= features.features(); ++f) out << ",f_" << f;
  out << '\n';
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out << features.sample_ids()[i] << ',' << features.group_ids()[i];
    for (std::size_t f = 0; f < features.features(); ++f) {
      out << ',' << format_double(features.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace simspace
