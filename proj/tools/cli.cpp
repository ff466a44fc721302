#include "cli.hpp"

#include "simspace/augmentation.hpp"
#include "simspace/correlation.hpp"
#include "simspace/csv.hpp"
#include "simspace/data_model.hpp"
#include "simspace/error.hpp"
#include "simspace/experiment.hpp"
#include "simspace/pixel_baseline.hpp"
#include "simspace/regression.hpp"
#include "simspace/smacof.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

namespace simspace {

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::pair<int, int> parse_dims(const std::string& text) {
  const auto dash = text.find('-');
  try {
    std::size_t used = 0;
    if (dash == std::string::npos) {
      const int d = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {d, d};
    }
    const int lo = std::stoi(text.substr(0, dash), &used);
    if (used != dash) throw std::invalid_argument(text);
    const std::string rest = text.substr(dash + 1);
    const int hi = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "--dims expects N or A-B, got '" + text + "'");
  }
}

std::vector<DistanceMetric> parse_metrics(const std::string& text) {
  if (text == "all") return {DistanceMetric::euclidean, DistanceMetric::manhattan, DistanceMetric::inner_product};
  return {parse_distance_metric(text)};
}

std::vector<Weighting> parse_weightings(const std::string& text) {
  if (text == "both") return {Weighting::none, Weighting::nnls};
  if (text == "none") return {Weighting::none};
  if (text == "nnls") return {Weighting::nnls};
  throw Error(ErrorKind::InvalidArgument, "unknown weighting '" + text + "'");
}

bool looks_like_feature_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  return table.header.size() >= 2 && table.header[0] == "sample_id" && table.header[1] == "group_id";
}

Representation load_representation(const std::filesystem::path& path) {
  if (looks_like_feature_csv(path)) return Representation::from(load_feature_csv(path));
  return Representation::from(load_configuration_csv(path));
}

// --- subcommands -----------------------------------------------------------

struct MdsArgs {
  std::string dissimilarities, mode = "nonmetric", dims = "2", out, scree;
  int restarts = 256, max_iter = 1000;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;
};

void run_mds(const MdsArgs& a, std::ostream& out) {
  const auto delta = load_dissimilarity_csv(a.dissimilarities);
  MdsOptions options;
  options.mode = parse_mds_mode(a.mode);
  options.restarts = a.restarts;
  options.max_iterations = a.max_iter;
  options.convergence_epsilon = a.epsilon;
  options.seed = a.seed;
  const auto [lo, hi] = parse_dims(a.dims);
  if (lo == hi) {
    options.dims = lo;
    options.validate();
    const auto result = fit_mds(delta, options);
    save_configuration_csv(result.configuration, a.out);
    out << "stress " << format_double(result.stress) << " (restart " << result.best_restart << ")\n";
    if (!a.scree.empty()) {
      ScreeRow row{lo, result, 0.0, 0.0};
      MdsOptions other = options;
      other.mode = options.mode == MdsMode::metric ? MdsMode::nonmetric : MdsMode::metric;
      const double other_stress = evaluate_stress(result.configuration, delta, other.mode);
      row.metric_stress = options.mode == MdsMode::metric ? result.stress : other_stress;
      row.nonmetric_stress = options.mode == MdsMode::nonmetric ? result.stress : other_stress;
      save_scree_csv({row}, a.scree);
    }
    return;
  }
  const auto rows = dimension_sweep(delta, lo, hi, options);
  const std::filesystem::path base(a.out);
  for (const auto& row : rows) {
    auto path = base.parent_path() / (base.stem().string() + "_t" + std::to_string(row.dims) + base.extension().string());
    save_configuration_csv(row.result.configuration, path);
    out << "t=" << row.dims << " stress " << format_double(row.result.stress) << "\n";
  }
  if (!a.scree.empty()) save_scree_csv(rows, a.scree);
}

struct StressArgs {
  std::string dissimilarities, configuration, mode = "both";
};

void run_stress(const StressArgs& a, std::ostream& out) {
  const auto delta = load_dissimilarity_csv(a.dissimilarities);
  const auto config = load_configuration_csv(a.configuration);
  std::vector<MdsMode> modes;
  if (a.mode == "both") modes = {MdsMode::metric, MdsMode::nonmetric};
  else modes = {parse_mds_mode(a.mode)};
  out << "mode,stress\n";
  for (auto mode : modes) out << to_string(mode) << ',' << format_double(evaluate_stress(config, delta, mode)) << '\n';
}

struct CorrelateArgs {
  std::string dissimilarities, representation, metric = "all", weighting = "both", out;
  int folds = 5;
  std::uint64_t seed = 0;
};

void run_correlate(const CorrelateArgs& a, std::ostream& out) {
  const auto delta = load_dissimilarity_csv(a.dissimilarities);
  const auto rep = load_representation(a.representation);
  const auto metrics = parse_metrics(a.metric);
  const auto weightings = parse_weightings(a.weighting);

  std::vector<CorrelationReport> reports;
  for (auto w : weightings)
    for (auto m : metrics) reports.push_back(correlation_analysis(rep, delta, m, w, a.folds, a.seed));

  std::ostringstream text;
  text << "metric,weighted,pearson_r,spearman_rho,n_pairs,best\n";
  for (const auto& r : reports) {
    double top = -2.0;
    for (const auto& other : reports)
      if (other.weighted == r.weighted) top = std::max(top, other.pearson_r);
    text << to_string(r.metric) << ',' << (r.weighted ? "true" : "false") << ',' << format_double(r.pearson_r) << ','
         << format_double(r.spearman_rho) << ',' << r.n_pairs << ',' << (r.pearson_r == top ? "true" : "false")
         << '\n';
  }
  if (a.out.empty()) {
    out << text.str();
  } else {
    auto file = csv::open_output(a.out);
    file << text.str();
  }
}

struct PixelArgs {
  std::string images, aggregator = "mean", out, manifest;
  std::vector<std::size_t> blocks;
};

void run_pixel(const PixelArgs& a, std::ostream& out) {
  const Aggregator agg = parse_aggregator(a.aggregator);
  std::map<std::string, std::string> groups;
  if (!a.manifest.empty()) groups = AugmentationManifest::load(a.manifest).group_map();
  const std::filesystem::path base(a.out);
  for (std::size_t block : a.blocks) {
    auto path = base;
    if (a.blocks.size() > 1) {
      path = base.parent_path() / (base.stem().string() + "_k" + std::to_string(block) + base.extension().string());
    }
    const auto features = pixel_features(a.images, block, agg, groups);
    save_feature_csv(features, path);
    out << path.string() << ": " << features.rows() << " x " << features.features() << '\n';
  }
}

struct AugmentArgs {
  std::string images, out;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> steps;
};

void run_augment(const AugmentArgs& a, std::ostream& out) {
  AugmentationPlan plan;
  plan.per_image = a.count;
  plan.seed = a.seed;
  if (!a.steps.empty()) {
    plan.steps.clear();
    for (const auto& s : a.steps) plan.steps.push_back(parse_augment_step(s));
  }
  plan.validate();
  const auto manifest = augment_dataset(a.images, plan, a.out);
  out << manifest.rows.size() << " images written to " << a.out << '\n';
}

struct RegressArgs {
  std::string features, targets, regressor = "linear", out, feature_space, target_space;
  std::vector<double> beta_grid;
  int folds = 8;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shuffle_seed;
};

void run_regress(const RegressArgs& a, std::ostream& out) {
  const auto features = load_feature_csv(a.features);
  auto assignment = TargetAssignment::from_configuration(normalize_configuration(load_configuration_csv(a.targets)));
  if (a.shuffle_seed) assignment = shuffle_targets(assignment, *a.shuffle_seed);
  const std::string fname = a.feature_space.empty() ? std::filesystem::path(a.features).stem().string() : a.feature_space;
  const std::string tname = a.target_space.empty() ? std::filesystem::path(a.targets).stem().string() : a.target_space;

  const RegressorKind kind = parse_regressor_kind(a.regressor);
  std::vector<EvaluationReport> reports;
  std::vector<bool> best;
  if (kind == RegressorKind::lasso) {
    const auto grid = a.beta_grid.empty() ? default_beta_grid() : a.beta_grid;
    auto sweep = beta_sweep(features, assignment, grid, a.folds, a.seed);
    reports = std::move(sweep.reports);
    best = std::move(sweep.best);
  } else {
    RegressorSpec spec{kind, 0.0};
    reports.push_back(grouped_cross_validation(features, assignment, spec, a.folds, a.seed));
    best.push_back(true);
  }
  for (auto& r : reports) {
    r.feature_space = fname;
    r.target_space = tname;
  }
  save_report_csv(reports, best, a.out);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!best[i]) continue;
    out << to_string(reports[i].regressor.kind);
    if (reports[i].regressor.kind == RegressorKind::lasso) out << " beta=" << format_double(reports[i].regressor.beta);
    out << " mse_test=" << format_double(reports[i].test.mse) << " r2_test=" << format_double(reports[i].test.r_squared)
        << '\n';
  }
}

void run_experiment_command(const std::string& config_path, std::ostream& out) {
  const auto config = ExperimentConfig::load(config_path);
  const auto result = run_experiment(config);
  for (const auto& path : result.written) out << path.string() << '\n';
}

// CLI11 reports missing required options before unexpected ones; users
// should hear about the flag they mistyped first.
std::optional<std::string> unknown_flag(const CLI::App& app, int argc, const char* const* argv) {
  const CLI::App* scope = &app;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("-", 0) != 0) {
      if (scope == &app) {
        if (auto* sub = app.get_subcommand_no_throw(arg)) scope = sub;
      }
      continue;
    }
    if (arg == "--") break;
    if (arg.size() > 1 && (std::isdigit(static_cast<unsigned char>(arg[1])) || arg[1] == '.')) continue;
    const std::string name = arg.substr(0, arg.find('='));
    if (!scope->get_option_no_throw(name) && !app.get_option_no_throw(name)) return name;
  }
  return std::nullopt;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity-space construction and evaluation", "simspace"};
  app.require_subcommand(1);

  MdsArgs mds;
  auto* mds_cmd = app.add_subcommand("mds", "Fit a metric or nonmetric SMACOF configuration");
  mds_cmd->add_option("--dissimilarities", mds.dissimilarities, "Dissimilarity matrix CSV")->required();
  mds_cmd->add_option("--mode", mds.mode, "metric or nonmetric")->capture_default_str();
  mds_cmd->add_option("--dims", mds.dims, "Target dimensionality N or a range A-B")->capture_default_str();
  mds_cmd->add_option("--restarts", mds.restarts)->capture_default_str();
  mds_cmd->add_option("--max-iter", mds.max_iter)->capture_default_str();
  mds_cmd->add_option("--epsilon", mds.epsilon, "Stop when the stress decrease falls below this")->capture_default_str();
  mds_cmd->add_option("--seed", mds.seed)->required();
  mds_cmd->add_option("--out", mds.out, "Configuration CSV (a range writes <stem>_t<d>.csv)")->required();
  mds_cmd->add_option("--scree", mds.scree, "Scree CSV");

  StressArgs stress;
  auto* stress_cmd = app.add_subcommand("stress", "Stress-1 of a configuration");
  stress_cmd->add_option("--dissimilarities", stress.dissimilarities)->required();
  stress_cmd->add_option("--configuration", stress.configuration)->required();
  stress_cmd->add_option("--mode", stress.mode, "metric, nonmetric or both")->capture_default_str();

  CorrelateArgs corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Correlate representation distances with dissimilarities");
  corr_cmd->add_option("--dissimilarities", corr.dissimilarities)->required();
  corr_cmd->add_option("--representation", corr.representation, "Configuration or feature CSV")->required();
  corr_cmd->add_option("--metric", corr.metric, "euclidean, manhattan, inner_product or all")->capture_default_str();
  corr_cmd->add_option("--weighting", corr.weighting, "none, nnls or both")->capture_default_str();
  corr_cmd->add_option("--folds", corr.folds)->capture_default_str();
  corr_cmd->add_option("--seed", corr.seed)->required();
  corr_cmd->add_option("--out", corr.out, "CSV path (stdout when omitted)");

  PixelArgs pixel;
  auto* pixel_cmd = app.add_subcommand("pixel-baseline", "Block-aggregated pixel features");
  pixel_cmd->add_option("--images", pixel.images)->required();
  pixel_cmd->add_option("--block", pixel.blocks, "Block size; several values write <stem>_k<k>.csv")
      ->required()
      ->delimiter(',');
  pixel_cmd->add_option("--aggregator", pixel.aggregator, "min, mean, median or max")->capture_default_str();
  pixel_cmd->add_option("--out", pixel.out)->required();
  pixel_cmd->add_option("--manifest", pixel.manifest, "Augmentation manifest supplying group ids");

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment", "Write seeded augmented image variants");
  aug_cmd->add_option("--images", aug.images)->required();
  aug_cmd->add_option("--count", aug.count)->capture_default_str();
  aug_cmd->add_option("--seed", aug.seed)->required();
  aug_cmd->add_option("--out", aug.out)->required();
  aug_cmd->add_option("--steps", aug.steps, "Subset of crop,blur,noise,affine,contrast,brightness")->delimiter(',');

  RegressArgs reg;
  auto* reg_cmd = app.add_subcommand("regress", "Grouped cross-validated regression into a target space");
  reg_cmd->add_option("--features", reg.features)->required();
  reg_cmd->add_option("--targets", reg.targets, "Configuration CSV keyed by group id")->required();
  reg_cmd->add_option("--regressor", reg.regressor, "linear, lasso or baseline")->capture_default_str();
  reg_cmd->add_option("--beta-grid", reg.beta_grid, "Lasso strengths")->delimiter(',');
  reg_cmd->add_option("--folds", reg.folds)->capture_default_str();
  reg_cmd->add_option("--seed", reg.seed)->required();
  reg_cmd->add_option("--shuffle-targets", reg.shuffle_seed, "Permute group targets with this seed");
  reg_cmd->add_option("--out", reg.out)->required();
  reg_cmd->add_option("--feature-space", reg.feature_space, "Label for the report");
  reg_cmd->add_option("--target-space", reg.target_space, "Label for the report");

  std::string config_path;
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment preset from a config file");
  exp_cmd->add_option("--config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (const auto flag = unknown_flag(app, argc, argv)) err << "error: unknown option " << *flag << "\n\n";
    else err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitValidation;
  }

  try {
    if (*mds_cmd) run_mds(mds, out);
    else if (*stress_cmd) run_stress(stress, out);
    else if (*corr_cmd) run_correlate(corr, out);
    else if (*pixel_cmd) run_pixel(pixel, out);
    else if (*aug_cmd) run_augment(aug, out);
    else if (*reg_cmd) run_regress(reg, out);
    else if (*exp_cmd) run_experiment_command(config_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? kExitValidation : kExitRuntime;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace simspace
