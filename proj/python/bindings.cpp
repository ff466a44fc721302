#include "simspace/correlation.hpp"
#include "simspace/data_model.hpp"
#include "simspace/error.hpp"
#include "simspace/image.hpp"
#include "simspace/monotone.hpp"
#include "simspace/nnls.hpp"
#include "simspace/pixel_baseline.hpp"
#include "simspace/regression.hpp"
#include "simspace/smacof.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace simspace;

namespace {

std::vector<std::string> default_labels(Eigen::Index n) {
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i + 1));
  return labels;
}

DissimilarityMatrix as_delta(const Eigen::MatrixXd& delta) { return {default_labels(delta.rows()), delta}; }

Representation as_rep(const Eigen::MatrixXd& rows) { return {default_labels(rows.rows()), rows}; }

py::dict mds_dict(const MdsResult& r) {
  py::dict d;
  d["coords"] = r.configuration.coords();
  d["stress"] = r.stress;
  d["best_restart"] = r.best_restart;
  d["restart_stresses"] = r.restart_stresses;
  d["iterations"] = r.iterations_used;
  return d;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["mse"] = m.mse;
  d["med"] = m.med;
  d["r_squared"] = m.r_squared;
  return d;
}

MdsOptions mds_options(const std::string& mode, int dims, int restarts, int max_iterations, double epsilon,
                       std::uint64_t seed) {
  MdsOptions o;
  o.mode = parse_mds_mode(mode);
  o.dims = dims;
  o.restarts = restarts;
  o.max_iterations = max_iterations;
  o.convergence_epsilon = epsilon;
  o.seed = seed;
  return o;
}

RasterImage as_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& pixels) {
  if (pixels.ndim() != 2 && pixels.ndim() != 3) throw Error(ErrorKind::InvalidArgument, "image must be HxW or HxWxC");
  RasterImage img(static_cast<std::size_t>(pixels.shape(1)), static_cast<std::size_t>(pixels.shape(0)),
                  pixels.ndim() == 3 ? static_cast<std::size_t>(pixels.shape(2)) : 1);
  std::copy(pixels.data(), pixels.data() + pixels.size(), img.data.begin());
  return img;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Similarity-space construction and evaluation";
  py::register_exception<Error>(m, "SimspaceError", PyExc_ValueError);

  m.def(
      "pava",
      [](const std::vector<double>& values, std::optional<std::vector<double>> weights) {
        const auto fit = weights ? pava(values, *weights) : pava(values);
        return py::make_tuple(fit.fitted, fit.sse);
      },
      py::arg("values"), py::arg("weights") = py::none(), "Least-squares nondecreasing fit; returns (fitted, sse).");

  m.def(
      "evaluate_stress",
      [](const Eigen::MatrixXd& coords, const Eigen::MatrixXd& delta, const std::string& mode) {
        return evaluate_stress(Configuration(default_labels(coords.rows()), coords), as_delta(delta),
                               parse_mds_mode(mode));
      },
      py::arg("coords"), py::arg("delta"), py::arg("mode") = "metric");

  m.def(
      "fit_mds",
      [](const Eigen::MatrixXd& delta, const std::string& mode, int dims, int restarts, int max_iterations,
         double epsilon, std::uint64_t seed) {
        const auto options = mds_options(mode, dims, restarts, max_iterations, epsilon, seed);
        const auto matrix = as_delta(delta);
        const auto result = [&] {
          py::gil_scoped_release release;
          return fit_mds(matrix, options);
        }();
        return mds_dict(result);
      },
      py::arg("delta"), py::arg("mode") = "metric", py::arg("dims") = 2, py::arg("restarts") = 256,
      py::arg("max_iterations") = 1000, py::arg("epsilon") = 1e-6, py::arg("seed") = 0);

  m.def(
      "dimension_sweep",
      [](const Eigen::MatrixXd& delta, int min_dims, int max_dims, const std::string& mode, int restarts,
         int max_iterations, double epsilon, std::uint64_t seed) {
        const auto options = mds_options(mode, min_dims, restarts, max_iterations, epsilon, seed);
        py::list out;
        for (const auto& row : dimension_sweep(as_delta(delta), min_dims, max_dims, options)) {
          py::dict d = mds_dict(row.result);
          d["dims"] = row.dims;
          d["metric_stress"] = row.metric_stress;
          d["nonmetric_stress"] = row.nonmetric_stress;
          out.append(d);
        }
        return out;
      },
      py::arg("delta"), py::arg("min_dims"), py::arg("max_dims"), py::arg("mode") = "nonmetric",
      py::arg("restarts") = 256, py::arg("max_iterations") = 1000, py::arg("epsilon") = 1e-6, py::arg("seed") = 0);

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
  m.def("fractional_ranks", [](const std::vector<double>& x) { return fractional_ranks(x); });

  m.def(
      "pairwise_distances",
      [](const Eigen::MatrixXd& rows, const std::string& metric, std::optional<std::vector<double>> weights) {
        const auto result = pairwise_distances(as_rep(rows), {parse_distance_metric(metric), std::move(weights)});
        return py::make_tuple(result.matrix.values(), result.shift);
      },
      py::arg("rows"), py::arg("metric") = "euclidean", py::arg("weights") = py::none(),
      "Returns (matrix, shift); shift is nonzero only for inner_product.");

  m.def(
      "fit_distance_weights",
      [](const Eigen::MatrixXd& rows, const Eigen::MatrixXd& delta, const std::string& metric, int folds,
         std::uint64_t seed) {
        const auto fit = fit_distance_weights(as_rep(rows), parse_distance_metric(metric), as_delta(delta), folds, seed);
        py::dict d;
        d["weights"] = fit.weights;
        d["cv_predictions"] = fit.cv_predictions;
        d["residual_norm"] = fit.residual_norm;
        d["degenerate"] = fit.degenerate;
        return d;
      },
      py::arg("rows"), py::arg("delta"), py::arg("metric") = "euclidean", py::arg("folds") = 5, py::arg("seed") = 0);

  m.def(
      "correlation_analysis",
      [](const Eigen::MatrixXd& rows, const Eigen::MatrixXd& delta, const std::string& metric,
         const std::string& weighting, int folds, std::uint64_t seed) {
        if (weighting != "none" && weighting != "nnls") {
          throw Error(ErrorKind::InvalidArgument, "weighting must be none or nnls");
        }
        const auto r = correlation_analysis(as_rep(rows), as_delta(delta), parse_distance_metric(metric),
                                            weighting == "nnls" ? Weighting::nnls : Weighting::none, folds, seed);
        py::dict d;
        d["pearson_r"] = r.pearson_r;
        d["spearman_rho"] = r.spearman_rho;
        d["n_pairs"] = r.n_pairs;
        d["degenerate_weights"] = r.degenerate_weights;
        return d;
      },
      py::arg("rows"), py::arg("delta"), py::arg("metric") = "euclidean", py::arg("weighting") = "none",
      py::arg("folds") = 5, py::arg("seed") = 0);

  m.def(
      "nnls",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
        const auto r = nnls(a, b);
        return py::make_tuple(r.x, r.residual_norm);
      },
      py::arg("a"), py::arg("b"), "Nonnegative least squares; returns (x, residual_norm).");

  m.def(
      "block_downscale",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pixels, std::size_t block,
         const std::string& aggregator) {
        return block_downscale(as_image(pixels), block, parse_aggregator(aggregator));
      },
      py::arg("image"), py::arg("block"), py::arg("aggregator") = "mean",
      "image is HxW or HxWxC with values in [0, 1].");

  m.def("load_image", [](const std::string& path) {
    const auto img = load_image(path);
    std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(img.height), static_cast<py::ssize_t>(img.width)};
    if (img.channels > 1) shape.push_back(static_cast<py::ssize_t>(img.channels));
    py::array_t<double> out(shape);
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
  });

  m.def(
      "fit_linear",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        const auto model = fit_linear(x, y);
        return py::make_tuple(model.intercept, model.weights);
      },
      py::arg("features"), py::arg("targets"), "Returns (intercept, weights).");

  m.def(
      "fit_lasso",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double beta) {
        const auto model = fit_lasso(x, y, beta);
        return py::make_tuple(model.intercept, model.weights);
      },
      py::arg("features"), py::arg("targets"), py::arg("beta"), "Returns (intercept, weights).");

  m.def(
      "evaluate",
      [](const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
        return metrics_dict(evaluate(predictions, targets));
      },
      py::arg("predictions"), py::arg("targets"));

  m.def(
      "normalize_configuration",
      [](const Eigen::MatrixXd& coords) {
        return normalize_configuration(Configuration(default_labels(coords.rows()), coords)).coords();
      },
      py::arg("coords"));

  m.def(
      "grouped_cross_validation",
      [](const Eigen::MatrixXd& features, const std::vector<std::string>& group_ids,
         const std::map<std::string, Eigen::VectorXd>& targets, const std::string& regressor, double beta, int folds,
         std::uint64_t seed, std::optional<std::uint64_t> shuffle_seed) {
        std::vector<std::string> sample_ids;
        for (std::size_t i = 0; i < group_ids.size(); ++i) sample_ids.push_back("row" + std::to_string(i));
        const FeatureMatrix fm(sample_ids, group_ids, features);
        TargetAssignment assignment(targets, false);
        if (shuffle_seed) assignment = shuffle_targets(assignment, *shuffle_seed);
        const RegressorSpec spec{parse_regressor_kind(regressor), beta};
        const GroupedCrossValidation cv(fm, assignment, folds, seed);
        const auto report = [&] {
          py::gil_scoped_release release;
          return cv.run(spec);
        }();
        py::dict d;
        d["train"] = metrics_dict(report.train);
        d["test"] = metrics_dict(report.test);
        d["overfitting"] = metrics_dict(report.overfitting);
        d["shuffled"] = report.shuffled;
        d["predictions"] = cv.last_test_predictions();
        d["fold_of_row"] = cv.fold_of_row();
        return d;
      },
      py::arg("features"), py::arg("group_ids"), py::arg("targets"), py::arg("regressor") = "linear",
      py::arg("beta") = 0.0, py::arg("folds") = 8, py::arg("seed") = 0, py::arg("shuffle_seed") = py::none(),
      "targets maps group id -> target point.");

  m.attr("IDENTITY_SHUFFLE_SEED") = kIdentityShuffleSeed;
}
