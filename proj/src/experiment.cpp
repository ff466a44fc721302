#include "simspace/experiment.hpp"

#include "simspace/error.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace simspace {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Config, "key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(parse_number<double>(trim(item), key));
  return values;
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile file;
  std::string current;
  std::stringstream stream(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(stream, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Config, "line " + std::to_string(number) + ": unterminated section");
      current = trim(line.substr(1, line.size() - 2));
      file.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "line " + std::to_string(number) + ": expected key = value");
    if (current.empty()) throw Error(ErrorKind::Config, "line " + std::to_string(number) + ": entry outside a section");
    const std::string key = trim(line.substr(0, eq));
    auto& section = file.sections_[current];
    for (const auto& [existing, value] : section) {
      if (existing == key) throw Error(ErrorKind::Config, "line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    section.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const KeyValueFile::Section& KeyValueFile::section(const std::string& name) const {
  static const Section empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

std::optional<std::string> KeyValueFile::get(const std::string& section_name, const std::string& key) const {
  for (const auto& [k, v] : section(section_name))
    if (k == key) return v;
  return std::nullopt;
}

std::vector<std::string> KeyValueFile::section_names() const {
  std::vector<std::string> names;
  for (const auto& [name, entries] : sections_) names.push_back(name);
  return names;
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  const KeyValueFile file = KeyValueFile::load(path);
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  static const std::set<std::string> known_sections{"experiment", "features", "targets", "mds"};
  for (const auto& name : file.section_names()) {
    if (!known_sections.count(name)) throw Error(ErrorKind::Config, "unknown section [" + name + "]");
  }
  const auto check_keys = [&](const std::string& section, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : file.section(section)) {
      if (!allowed.count(key)) throw Error(ErrorKind::Config, "unknown key '" + key + "' in [" + section + "]");
    }
  };
  check_keys("experiment", {"preset", "output", "seed", "shuffle_seed", "folds", "beta_grid"});
  check_keys("mds", {"dissimilarities", "restarts", "max_iterations", "epsilon", "seed", "dims", "min_dims", "max_dims"});

  ExperimentConfig config;
  const auto require = [&](const std::string& key) {
    auto value = file.get("experiment", key);
    if (!value || value->empty()) throw Error(ErrorKind::Config, "[experiment] needs '" + key + "'");
    return *value;
  };
  const std::string preset = require("preset");
  if (preset == "exp1") config.preset = ExperimentPreset::exp1;
  else if (preset == "exp2") config.preset = ExperimentPreset::exp2;
  else if (preset == "exp3") config.preset = ExperimentPreset::exp3;
  else throw Error(ErrorKind::Config, "unknown preset '" + preset + "'");

  config.output = resolve(require("output"));
  config.seed = parse_number<std::uint64_t>(require("seed"), "seed");
  config.shuffle_seed = config.seed;
  if (auto v = file.get("experiment", "shuffle_seed")) config.shuffle_seed = parse_number<std::uint64_t>(*v, "shuffle_seed");
  if (auto v = file.get("experiment", "folds")) config.folds = parse_number<int>(*v, "folds");
  if (auto v = file.get("experiment", "beta_grid")) config.beta_grid = parse_list(*v, "beta_grid");

  for (const auto& [name, p] : file.section("features")) config.features.emplace_back(name, resolve(p));
  for (const auto& [name, p] : file.section("targets")) config.targets.emplace_back(name, resolve(p));

  config.mds.seed = config.seed;
  config.mds.dims = 4;
  if (auto v = file.get("mds", "dissimilarities")) config.dissimilarities = resolve(*v);
  if (auto v = file.get("mds", "restarts")) config.mds.restarts = parse_number<int>(*v, "restarts");
  if (auto v = file.get("mds", "max_iterations")) config.mds.max_iterations = parse_number<int>(*v, "max_iterations");
  if (auto v = file.get("mds", "epsilon")) config.mds.convergence_epsilon = parse_number<double>(*v, "epsilon");
  if (auto v = file.get("mds", "seed")) config.mds.seed = parse_number<std::uint64_t>(*v, "seed");
  if (auto v = file.get("mds", "dims")) config.mds.dims = parse_number<int>(*v, "dims");
  if (auto v = file.get("mds", "min_dims")) config.min_dims = parse_number<int>(*v, "min_dims");
  if (auto v = file.get("mds", "max_dims")) config.max_dims = parse_number<int>(*v, "max_dims");

  config.validate();
  return config;
}

void ExperimentConfig::validate() const {
  const auto exists = [](const std::filesystem::path& p, const std::string& what) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) throw Error(ErrorKind::Config, what + " '" + p.string() + "' does not exist");
  };
  if (features.empty()) throw Error(ErrorKind::Config, "[features] must name at least one feature file");
  for (const auto& [name, p] : features) exists(p, "feature file " + name);
  for (const auto& [name, p] : targets) exists(p, "target file " + name);
  if (dissimilarities) exists(*dissimilarities, "dissimilarity file");
  if (folds < 2) throw Error(ErrorKind::Config, "folds must be >= 2");
  if (beta_grid.empty()) throw Error(ErrorKind::Config, "beta_grid is empty");
  for (double b : beta_grid)
    if (!(b >= 0.0)) throw Error(ErrorKind::Config, "beta values must be >= 0");

  switch (preset) {
    case ExperimentPreset::exp1:
      if (targets.size() != 1) throw Error(ErrorKind::Config, "exp1 needs exactly one entry in [targets]");
      break;
    case ExperimentPreset::exp2:
      if (targets.empty() && !dissimilarities) {
        throw Error(ErrorKind::Config, "exp2 needs [targets] entries or [mds] dissimilarities");
      }
      mds.validate();
      break;
    case ExperimentPreset::exp3:
      if (!dissimilarities) throw Error(ErrorKind::Config, "exp3 needs [mds] dissimilarities");
      if (min_dims < 1 || max_dims < min_dims) throw Error(ErrorKind::Config, "invalid min_dims/max_dims");
      break;
  }
}

// ---------------------------------------------------------------------------

namespace {

struct Runner {
  const ExperimentConfig& config;
  ExperimentResult& result;

  EvaluationReport label(EvaluationReport report, const std::string& features, const std::string& targets) const {
    report.feature_space = features;
    report.target_space = targets;
    return report;
  }

  EvaluationReport baseline(const FeatureMatrix& features, const TargetAssignment& targets,
                            const std::string& feature_name, const std::string& target_name) const {
    const GroupedCrossValidation cv(features, targets, config.folds, config.seed);
    return label(cv.run({RegressorKind::zero_baseline, 0.0}), feature_name, target_name);
  }

  EvaluationReport linear(const FeatureMatrix& features, const TargetAssignment& targets,
                          const std::string& feature_name, const std::string& target_name) const {
    const GroupedCrossValidation cv(features, targets, config.folds, config.seed);
    return label(cv.run({RegressorKind::linear, 0.0}), feature_name, target_name);
  }

  // Appends every grid entry to the sweep list and returns the best one.
  EvaluationReport best_lasso(const FeatureMatrix& features, const TargetAssignment& targets,
                              const std::string& feature_name, const std::string& target_name) {
    BetaSweep sweep = beta_sweep(features, targets, config.beta_grid, config.folds, config.seed);
    std::size_t best = 0;
    for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
      sweep.reports[i] = label(sweep.reports[i], feature_name, target_name);
      result.sweeps.push_back(sweep.reports[i]);
      result.sweep_best.push_back(sweep.best[i]);
      if (sweep.reports[i].test.mse < sweep.reports[best].test.mse) best = i;
    }
    return sweep.reports[best];
  }

  void save_space(const Configuration& space, const std::string& name) {
    const auto path = config.output / ("space_" + name + ".csv");
    save_configuration_csv(space, path);
    result.written.push_back(path);
  }
};

TargetAssignment normalized_targets(const Configuration& space) {
  return TargetAssignment::from_configuration(normalize_configuration(space));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  Runner runner{config, result};
  std::filesystem::create_directories(config.output);

  std::vector<std::pair<std::string, FeatureMatrix>> features;
  for (const auto& [name, p] : config.features) features.emplace_back(name, load_feature_csv(p));

  std::vector<std::pair<std::string, Configuration>> spaces;
  for (const auto& [name, p] : config.targets) spaces.emplace_back(name, load_configuration_csv(p));

  if (config.preset == ExperimentPreset::exp2 && config.dissimilarities) {
    const auto delta = load_dissimilarity_csv(*config.dissimilarities);
    for (auto mode : {MdsMode::metric, MdsMode::nonmetric}) {
      MdsOptions options = config.mds;
      options.mode = mode;
      const std::string name = std::string(to_string(mode)) + "_smacof_t" + std::to_string(options.dims);
      spaces.emplace_back(name, fit_mds(delta, options).configuration);
      runner.save_space(spaces.back().second, name);
    }
  }
  if (config.preset == ExperimentPreset::exp3) {
    const auto delta = load_dissimilarity_csv(*config.dissimilarities);
    MdsOptions options = config.mds;
    options.mode = MdsMode::nonmetric;
    const auto rows = dimension_sweep(delta, config.min_dims, config.max_dims, options);
    const auto scree = config.output / "scree.csv";
    save_scree_csv(rows, scree);
    result.written.push_back(scree);
    spaces.clear();
    for (const auto& row : rows) {
      const std::string name = "nonmetric_smacof_t" + std::to_string(row.dims);
      spaces.emplace_back(name, row.result.configuration);
      runner.save_space(row.result.configuration, name);
    }
  }

  if (config.preset == ExperimentPreset::exp1) {
    const auto& [target_name, space] = spaces.front();
    const TargetAssignment correct = normalized_targets(space);
    const TargetAssignment shuffled = shuffle_targets(correct, config.shuffle_seed);
    result.summary.push_back(runner.baseline(features.front().second, correct, "any", target_name));
    for (const auto& [name, fm] : features) {
      result.summary.push_back(runner.linear(fm, correct, name, target_name));
      result.summary.push_back(runner.linear(fm, shuffled, name, target_name));
    }
    for (const auto& [name, fm] : features) {
      result.summary.push_back(runner.best_lasso(fm, correct, name, target_name));
      result.summary.push_back(runner.best_lasso(fm, shuffled, name, target_name));
    }
  } else {
    const auto& [feature_name, fm] = features.front();
    std::vector<TargetAssignment> assignments;
    for (const auto& [name, space] : spaces) assignments.push_back(normalized_targets(space));
    for (std::size_t s = 0; s < spaces.size(); ++s)
      result.summary.push_back(runner.baseline(fm, assignments[s], feature_name, spaces[s].first));
    for (std::size_t s = 0; s < spaces.size(); ++s)
      result.summary.push_back(runner.linear(fm, assignments[s], feature_name, spaces[s].first));
    for (std::size_t s = 0; s < spaces.size(); ++s)
      result.summary.push_back(runner.best_lasso(fm, assignments[s], feature_name, spaces[s].first));
  }

  const auto report_path = config.output / "report.csv";
  save_report_csv(result.summary, {}, report_path);
  result.written.push_back(report_path);
  const auto sweep_path = config.output / "sweeps.csv";
  save_report_csv(result.sweeps, result.sweep_best, sweep_path);
  result.written.push_back(sweep_path);
  return result;
}

}  // namespace simspace
