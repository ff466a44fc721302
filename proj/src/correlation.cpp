#include "simspace/correlation.hpp"

#include "simspace/error.hpp"
#include "simspace/nnls.hpp"
#include "simspace/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simspace {

const char* to_string(DistanceMetric metric) noexcept {
  switch (metric) {
    case DistanceMetric::euclidean: return "euclidean";
    case DistanceMetric::manhattan: return "manhattan";
    case DistanceMetric::inner_product: return "inner_product";
  }
  return "unknown";
}

DistanceMetric parse_distance_metric(std::string_view text) {
  if (text == "euclidean") return DistanceMetric::euclidean;
  if (text == "manhattan") return DistanceMetric::manhattan;
  if (text == "inner_product") return DistanceMetric::inner_product;
  throw Error(ErrorKind::InvalidArgument, "unknown distance metric '" + std::string(text) + "'");
}

const char* to_string(Weighting weighting) noexcept {
  return weighting == Weighting::none ? "none" : "nnls";
}

void DistanceSpec::validate(std::size_t features) const {
  if (!weights) return;
  if (weights->size() != features) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(features) + " weights, got " +
                                                  std::to_string(weights->size()));
  }
  bool any_positive = false;
  for (double w : *weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "distance weights must be finite and >= 0");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::InvalidArgument, "distance weights are all zero");
}

double pair_distance(std::span<const double> u, std::span<const double> v, const DistanceSpec& spec) {
  if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "vectors differ in length");
  const auto weight = [&](std::size_t k) { return spec.weights ? (*spec.weights)[k] : 1.0; };
  double acc = 0.0;
  switch (spec.metric) {
    case DistanceMetric::euclidean:
      for (std::size_t k = 0; k < u.size(); ++k) acc += weight(k) * (u[k] - v[k]) * (u[k] - v[k]);
      return std::sqrt(acc);
    case DistanceMetric::manhattan:
      for (std::size_t k = 0; k < u.size(); ++k) acc += weight(k) * std::abs(u[k] - v[k]);
      return acc;
    case DistanceMetric::inner_product:
      for (std::size_t k = 0; k < u.size(); ++k) acc += weight(k) * u[k] * v[k];
      return -acc;
  }
  return acc;
}

namespace {

std::vector<double> row_vector(const Eigen::MatrixXd& m, Eigen::Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.cols(); ++k) out[static_cast<std::size_t>(k)] = m(i, k);
  return out;
}

// Raw pair distances in upper-triangle order.
std::vector<double> upper_distances(const Eigen::MatrixXd& rows, const DistanceSpec& spec) {
  std::vector<std::vector<double>> cache;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) cache.push_back(row_vector(rows, i));
  std::vector<double> out;
  for (std::size_t i = 0; i < cache.size(); ++i)
    for (std::size_t j = i + 1; j < cache.size(); ++j) out.push_back(pair_distance(cache[i], cache[j], spec));
  return out;
}

}  // namespace

PairwiseDistances pairwise_distances(const Representation& rep, const DistanceSpec& spec) {
  spec.validate(static_cast<std::size_t>(rep.rows.cols()));
  const auto upper = upper_distances(rep.rows, spec);
  double shift = 0.0;
  if (spec.metric == DistanceMetric::inner_product && !upper.empty()) {
    const double lowest = *std::min_element(upper.begin(), upper.end());
    if (lowest < 0.0) shift = -lowest;
  }
  const auto n = static_cast<Eigen::Index>(rep.labels.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  std::size_t p = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      values(i, j) = std::max(0.0, upper[p++] + shift);
      values(j, i) = values(i, j);
    }
  }
  return {DissimilarityMatrix(rep.labels, std::move(values)), shift};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "pearson: vectors differ in length");
  if (x.size() < 2) throw Error(ErrorKind::DimensionMismatch, "pearson: need at least two values");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::ConstantInput, "pearson: input has zero variance");
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 hold 1-based ranks start+1..end
    const double mid = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = mid;
    start = end;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "spearman: vectors differ in length");
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

// ---------------------------------------------------------------------------

namespace {

struct PairDesign {
  Eigen::MatrixXd contributions;  // pairs x k
  Eigen::VectorXd response;       // pairs
};

PairDesign build_design(const Eigen::MatrixXd& rows, DistanceMetric metric, const DissimilarityMatrix& delta) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index k = rows.cols();
  const Eigen::Index m = n * (n - 1) / 2;
  PairDesign design{Eigen::MatrixXd(m, k), Eigen::VectorXd(m)};
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++p) {
      const double target = delta(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      for (Eigen::Index f = 0; f < k; ++f) {
        const double u = rows(i, f);
        const double v = rows(j, f);
        switch (metric) {
          case DistanceMetric::euclidean: design.contributions(p, f) = (u - v) * (u - v); break;
          case DistanceMetric::manhattan: design.contributions(p, f) = std::abs(u - v); break;
          case DistanceMetric::inner_product: design.contributions(p, f) = u * v; break;
        }
      }
      switch (metric) {
        case DistanceMetric::euclidean: design.response(p) = target * target; break;
        case DistanceMetric::manhattan: design.response(p) = target; break;
        case DistanceMetric::inner_product: design.response(p) = -target; break;
      }
    }
  }
  return design;
}

double predicted_distance(double linear, DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::euclidean: return std::sqrt(std::max(0.0, linear));
    case DistanceMetric::manhattan: return linear;
    case DistanceMetric::inner_product: return -linear;
  }
  return linear;
}

}  // namespace

DistanceWeightFit fit_distance_weights(const Representation& rep, DistanceMetric metric,
                                       const DissimilarityMatrix& delta, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "weight fitting needs at least two folds");
  const Representation aligned = rep.aligned_to(delta.labels());
  const PairDesign design = build_design(aligned.rows, metric, delta);
  const auto m = static_cast<std::size_t>(design.response.size());
  if (m < static_cast<std::size_t>(folds)) {
    throw Error(ErrorKind::FoldTooSmall, std::to_string(m) + " pairs cannot fill " + std::to_string(folds) + " folds");
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = Rng::stream(seed, "pair-folds", 0);
  rng.shuffle(std::span<std::size_t>(order));

  DistanceWeightFit fit;
  fit.cv_predictions.assign(m, 0.0);
  const auto f_count = static_cast<std::size_t>(folds);
  for (std::size_t f = 0; f < f_count; ++f) {
    const std::size_t begin = f * m / f_count;
    const std::size_t end = (f + 1) * m / f_count;
    std::vector<bool> held_out(m, false);
    for (std::size_t q = begin; q < end; ++q) held_out[order[q]] = true;

    const auto train_rows = static_cast<Eigen::Index>(m - (end - begin));
    Eigen::MatrixXd a(train_rows, design.contributions.cols());
    Eigen::VectorXd b(train_rows);
    Eigen::Index r = 0;
    for (std::size_t p = 0; p < m; ++p) {
      if (held_out[p]) continue;
      a.row(r) = design.contributions.row(static_cast<Eigen::Index>(p));
      b(r) = design.response(static_cast<Eigen::Index>(p));
      ++r;
    }
    const auto solution = nnls(a, b);
    for (std::size_t q = begin; q < end; ++q) {
      const auto p = static_cast<Eigen::Index>(order[q]);
      fit.cv_predictions[order[q]] = predicted_distance(design.contributions.row(p).dot(solution.x), metric);
    }
  }

  const auto final_fit = nnls(design.contributions, design.response);
  fit.weights.assign(final_fit.x.data(), final_fit.x.data() + final_fit.x.size());
  fit.residual_norm = final_fit.residual_norm;
  fit.degenerate = final_fit.x.isZero(0.0);
  return fit;
}

CorrelationReport correlation_analysis(const Representation& rep, const DissimilarityMatrix& delta,
                                       DistanceMetric metric, Weighting weighting, int folds,
                                       std::uint64_t seed) {
  const Representation aligned = rep.aligned_to(delta.labels());
  const auto targets = delta.upper_triangle();
  CorrelationReport report;
  report.metric = metric;
  report.weighted = weighting == Weighting::nnls;
  report.n_pairs = targets.size();

  std::vector<double> distances;
  if (weighting == Weighting::nnls) {
    auto fit = fit_distance_weights(aligned, metric, delta, folds, seed);
    distances = std::move(fit.cv_predictions);
    report.degenerate_weights = fit.degenerate;
  } else {
    distances = upper_distances(aligned.rows, DistanceSpec{metric, std::nullopt});
  }
  if (report.weighted && std::all_of(distances.begin(), distances.end(),
                                     [&](double d) { return d == distances.front(); })) {
    // Zero weights leave nothing to correlate; reported, not raised.
    report.degenerate_weights = true;
    return report;
  }
  report.pearson_r = pearson(distances, targets);
  report.spearman_rho = spearman(distances, targets);
  return report;
}

}  // namespace simspace
