#pragma once

#include "simspace/data_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace simspace {

enum class MdsMode { metric, nonmetric };

const char* to_string(MdsMode mode) noexcept;
MdsMode parse_mds_mode(std::string_view text);

struct MdsOptions {
  MdsMode mode = MdsMode::metric;
  int dims = 2;
  int restarts = 256;
  int max_iterations = 1000;
  double convergence_epsilon = 1e-6;  // on stress decrease per iteration
  std::uint64_t seed = 0;

  void validate() const;
};

struct MdsResult {
  Configuration configuration;          // winning restart, centered
  double stress = 0.0;                  // == restart_stresses[best_restart]
  std::size_t best_restart = 0;
  std::vector<double> restart_stresses;
  std::vector<int> iterations_used;
};

/// Stress-1 of `config` against `delta`:
///   sqrt( sum_{i<j} (d_ij - dhat_ij)^2 / sum_{i<j} d_ij^2 )
/// metric: dhat = a * delta with the least-squares optimal a;
/// nonmetric: dhat is the monotone fit of d ordered by delta, ties in delta
/// ordered by d (primary approach).
double evaluate_stress(const Configuration& config, const DissimilarityMatrix& delta, MdsMode mode);

/// SMACOF with random restarts. Restart r starts from coordinates drawn
/// uniformly from [-1, 1] with the stream (seed, r), so results do not
/// depend on scheduling and a prefix of restarts reproduces exactly.
MdsResult fit_mds(const DissimilarityMatrix& delta, const MdsOptions& options);

/// One restart, exposing the stress after every Guttman iteration
/// (trace[0] is the initial configuration's stress).
struct RestartTrace {
  Eigen::MatrixXd coords;
  std::vector<double> stress_trace;
  int iterations = 0;
};
RestartTrace run_restart(const DissimilarityMatrix& delta, const MdsOptions& options, std::size_t restart);

struct ScreeRow {
  int dims = 0;
  MdsResult result;
  double metric_stress = 0.0;
  double nonmetric_stress = 0.0;
};

/// fit_mds for every t in [min_dims, max_dims]; each solution is also scored
/// in the other mode. options.dims is ignored.
std::vector<ScreeRow> dimension_sweep(const DissimilarityMatrix& delta, int min_dims, int max_dims,
                                      const MdsOptions& options);

/// Columns: dims,metric_stress,nonmetric_stress,best_restart,iterations
void save_scree_csv(const std::vector<ScreeRow>& rows, const std::filesystem::path& path);

}  // namespace simspace
