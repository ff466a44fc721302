#include "simspace/nnls.hpp"

#include "simspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace simspace {

namespace {

// Solves G_PP z_P = c_P for the passive index set.
Eigen::VectorXd solve_passive(const Eigen::MatrixXd& gram, const Eigen::VectorXd& atb,
                              const std::vector<Eigen::Index>& passive) {
  const auto p = static_cast<Eigen::Index>(passive.size());
  Eigen::MatrixXd sub(p, p);
  Eigen::VectorXd rhs(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    rhs(r) = atb(passive[r]);
    for (Eigen::Index c = 0; c < p; ++c) sub(r, c) = gram(passive[r], passive[c]);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(gram.rows());
  const Eigen::VectorXd zp = sub.completeOrthogonalDecomposition().solve(rhs);
  for (Eigen::Index r = 0; r < p; ++r) z(passive[r]) = zp(r);
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) throw Error(ErrorKind::DimensionMismatch, "nnls: rows of A and length of b differ");
  const Eigen::Index k = a.cols();
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd atb = a.transpose() * b;

  const double scale = std::max({1.0, atb.cwiseAbs().maxCoeff(), gram.cwiseAbs().maxCoeff()});
  const double tolerance = 64.0 * std::numeric_limits<double>::epsilon() * scale * static_cast<double>(std::max<Eigen::Index>(k, 1));

  NnlsResult result;
  result.x = Eigen::VectorXd::Zero(k);
  std::vector<bool> in_passive(static_cast<std::size_t>(k), false);
  Eigen::VectorXd w = atb;
  const int max_outer = 3 * static_cast<int>(k) + 10;

  // Indices whose admission failed numerically; cleared once x changes.
  std::vector<bool> blocked(static_cast<std::size_t>(k), false);

  while (result.iterations < max_outer) {
    Eigen::Index best = -1;
    double best_value = tolerance;
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (!in_passive[u] && !blocked[u] && w(j) > best_value) {
        best_value = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    ++result.iterations;
    in_passive[static_cast<std::size_t>(best)] = true;
    const Eigen::VectorXd previous = result.x;

    while (true) {
      std::vector<Eigen::Index> passive;
      for (Eigen::Index j = 0; j < k; ++j)
        if (in_passive[static_cast<std::size_t>(j)]) passive.push_back(j);
      if (passive.empty()) break;
      const Eigen::VectorXd z = solve_passive(gram, atb, passive);

      Eigen::Index blocking = -1;
      double alpha = 1.0;
      for (Eigen::Index j : passive) {
        if (z(j) <= 0.0) {
          const double step = result.x(j) / (result.x(j) - z(j));
          if (blocking < 0 || step < alpha) {
            alpha = step;
            blocking = j;
          }
        }
      }
      if (blocking < 0) {
        result.x = z;
        break;
      }
      // Move toward z until the first passive coordinate reaches zero, then
      // release every coordinate that is no longer positive.
      result.x += alpha * (z - result.x);
      result.x(blocking) = 0.0;
      for (Eigen::Index j : passive) {
        if (result.x(j) <= 0.0) {
          result.x(j) = 0.0;
          in_passive[static_cast<std::size_t>(j)] = false;
        }
      }
    }

    if (result.x == previous) {
      blocked[static_cast<std::size_t>(best)] = true;
    } else {
      std::fill(blocked.begin(), blocked.end(), false);
    }
    w = atb - gram * result.x;
  }

  for (Eigen::Index j = 0; j < k; ++j)
    if (!in_passive[static_cast<std::size_t>(j)]) result.x(j) = 0.0;
  result.dual = a.transpose() * (b - a * result.x);
  result.residual_norm = (a * result.x - b).norm();
  return result;
}

}  // namespace simspace
