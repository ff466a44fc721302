#include "simspace/smacof.hpp"

#include "simspace/csv.hpp"
#include "simspace/error.hpp"
#include "simspace/monotone.hpp"
#include "simspace/parallel.hpp"
#include "simspace/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simspace {

const char* to_string(MdsMode mode) noexcept {
  return mode == MdsMode::metric ? "metric" : "nonmetric";
}

MdsMode parse_mds_mode(std::string_view text) {
  if (text == "metric") return MdsMode::metric;
  if (text == "nonmetric") return MdsMode::nonmetric;
  throw Error(ErrorKind::InvalidArgument, "unknown MDS mode '" + std::string(text) + "'");
}

void MdsOptions::validate() const {
  if (dims < 1) throw Error(ErrorKind::InvalidArgument, "dims must be >= 1");
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
  if (!(convergence_epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "convergence_epsilon must be > 0");
}

namespace {

// Distances, disparities and stress of one configuration.
struct StressState {
  std::vector<double> distances;
  std::vector<double> disparities;
  double stress = 0.0;
};

// Pair bookkeeping shared by every iteration of every restart.
class StressModel {
 public:
  StressModel(const DissimilarityMatrix& delta, MdsMode mode) : n_(delta.size()), mode_(mode) {
    if (n_ < 2) throw Error(ErrorKind::InvalidArgument, "MDS needs at least two stimuli");
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        first_.push_back(i);
        second_.push_back(j);
        delta_.push_back(delta(i, j));
      }
    }
    delta_sq_sum_ = std::inner_product(delta_.begin(), delta_.end(), delta_.begin(), 0.0);

    order_.resize(delta_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return delta_[a] < delta_[b]; });
    // Runs of equal delta; their internal order is re-decided from d.
    for (std::size_t start = 0; start < order_.size();) {
      std::size_t end = start + 1;
      while (end < order_.size() && delta_[order_[end]] == delta_[order_[start]]) ++end;
      if (end - start > 1) tie_runs_.emplace_back(start, end);
      start = end;
    }
  }

  std::size_t points() const { return n_; }

  StressState evaluate(const Eigen::MatrixXd& x) const {
    StressState s;
    const std::size_t m = delta_.size();
    s.distances.resize(m);
    double d_sq_sum = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      const double d = (x.row(static_cast<Eigen::Index>(first_[p])) - x.row(static_cast<Eigen::Index>(second_[p]))).norm();
      s.distances[p] = d;
      d_sq_sum += d * d;
    }
    if (!(d_sq_sum > 0.0)) throw Error(ErrorKind::DegenerateConfiguration, "all inter-point distances are zero");

    s.disparities.resize(m);
    if (mode_ == MdsMode::metric) {
      const double cross = std::inner_product(s.distances.begin(), s.distances.end(), delta_.begin(), 0.0);
      const double a = delta_sq_sum_ > 0.0 ? cross / delta_sq_sum_ : 0.0;
      for (std::size_t p = 0; p < m; ++p) s.disparities[p] = a * delta_[p];
    } else {
      std::vector<std::size_t> order = order_;
      for (const auto& [begin, end] : tie_runs_) {
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end),
                  [&](std::size_t a, std::size_t b) { return s.distances[a] < s.distances[b]; });
      }
      std::vector<double> sorted(m);
      for (std::size_t k = 0; k < m; ++k) sorted[k] = s.distances[order[k]];
      const auto fit = pava(sorted);
      for (std::size_t k = 0; k < m; ++k) s.disparities[order[k]] = fit.fitted[k];
    }

    double residual = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      const double r = s.distances[p] - s.disparities[p];
      residual += r * r;
    }
    s.stress = std::sqrt(residual / d_sq_sum);
    return s;
  }

  // X+ = (1/n) B(X) X with disparities rescaled to the norm of the distances.
  Eigen::MatrixXd guttman(const Eigen::MatrixXd& x, const StressState& s) const {
    double d_sq = 0.0;
    double dhat_sq = 0.0;
    for (std::size_t p = 0; p < delta_.size(); ++p) {
      d_sq += s.distances[p] * s.distances[p];
      dhat_sq += s.disparities[p] * s.disparities[p];
    }
    const double scale = dhat_sq > 0.0 ? std::sqrt(d_sq / dhat_sq) : 0.0;

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (std::size_t p = 0; p < delta_.size(); ++p) {
      const double d = s.distances[p];
      if (d == 0.0) continue;  // b_ij = 0 for coincident points
      const double ratio = scale * s.disparities[p] / d;
      const auto i = static_cast<Eigen::Index>(first_[p]);
      const auto j = static_cast<Eigen::Index>(second_[p]);
      const Eigen::RowVectorXd diff = ratio * (x.row(i) - x.row(j));
      next.row(i) += diff;
      next.row(j) -= diff;
    }
    return next / static_cast<double>(n_);
  }

 private:
  std::size_t n_;
  MdsMode mode_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> second_;
  std::vector<double> delta_;
  double delta_sq_sum_ = 0.0;
  std::vector<std::size_t> order_;
  std::vector<std::pair<std::size_t, std::size_t>> tie_runs_;
};

RestartTrace run_restart(const StressModel& model, const MdsOptions& options, std::size_t restart) {
  auto rng = Rng::stream(options.seed, restart);
  const auto n = static_cast<Eigen::Index>(model.points());
  Eigen::MatrixXd x(n, options.dims);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < options.dims; ++d) x(i, d) = rng.uniform(-1.0, 1.0);

  RestartTrace trace;
  StressState state = model.evaluate(x);
  trace.stress_trace.push_back(state.stress);
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd next = model.guttman(x, state);
    StressState next_state = model.evaluate(next);
    const double decrease = state.stress - next_state.stress;
    x = std::move(next);
    state = std::move(next_state);
    trace.stress_trace.push_back(state.stress);
    trace.iterations = it;
    if (decrease < options.convergence_epsilon) break;
  }
  trace.coords = x.rowwise() - x.colwise().mean();
  return trace;
}

}  // namespace

double evaluate_stress(const Configuration& config, const DissimilarityMatrix& delta, MdsMode mode) {
  const Configuration aligned = config.aligned_to(delta.labels());
  return StressModel(delta, mode).evaluate(aligned.coords()).stress;
}

RestartTrace run_restart(const DissimilarityMatrix& delta, const MdsOptions& options, std::size_t restart) {
  options.validate();
  return run_restart(StressModel(delta, options.mode), options, restart);
}

MdsResult fit_mds(const DissimilarityMatrix& delta, const MdsOptions& options) {
  options.validate();
  const StressModel model(delta, options.mode);
  const auto restarts = static_cast<std::size_t>(options.restarts);

  std::vector<RestartTrace> traces(restarts);
  parallel_for(restarts, [&](std::size_t r) { traces[r] = run_restart(model, options, r); });

  std::vector<double> stresses(restarts);
  std::vector<int> iterations(restarts);
  std::size_t best = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    stresses[r] = traces[r].stress_trace.back();
    iterations[r] = traces[r].iterations;
    if (stresses[r] < stresses[best]) best = r;
  }
  return MdsResult{Configuration(delta.labels(), std::move(traces[best].coords)), stresses[best], best,
                   std::move(stresses), std::move(iterations)};
}

std::vector<ScreeRow> dimension_sweep(const DissimilarityMatrix& delta, int min_dims, int max_dims,
                                      const MdsOptions& options) {
  if (min_dims < 1 || max_dims < min_dims) {
    throw Error(ErrorKind::InvalidArgument, "dimension range must be nonempty with lower bound >= 1");
  }
  std::vector<ScreeRow> rows;
  for (int t = min_dims; t <= max_dims; ++t) {
    MdsOptions opts = options;
    opts.dims = t;
    MdsResult result = fit_mds(delta, opts);
    // The fitted mode reports the optimizer's own value.
    const double metric = opts.mode == MdsMode::metric ? result.stress
                                                        : evaluate_stress(result.configuration, delta, MdsMode::metric);
    const double nonmetric = opts.mode == MdsMode::nonmetric
                                 ? result.stress
                                 : evaluate_stress(result.configuration, delta, MdsMode::nonmetric);
    rows.push_back(ScreeRow{t, std::move(result), metric, nonmetric});
  }
  return rows;
}

void save_scree_csv(const std::vector<ScreeRow>& rows, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "dims,metric_stress,nonmetric_stress,best_restart,iterations\n";
  for (const auto& row : rows) {
    out << row.dims << ',' << format_double(row.metric_stress) << ',' << format_double(row.nonmetric_stress)
        << ',' << row.result.best_restart << ',' << row.result.iterations_used[row.result.best_restart] << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace simspace
