#pragma once

#include "simspace/regression.hpp"
#include "simspace/smacof.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace simspace {

/// Flat key-value text with [sections]. '#' starts a comment; keys and values
/// are trimmed. Entry order within a section is preserved.
class KeyValueFile {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::filesystem::path& path);

  const Section& section(const std::string& name) const;
  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::vector<std::string> section_names() const;

 private:
  std::map<std::string, Section> sections_;
};

enum class ExperimentPreset { exp1, exp2, exp3 };

/// Declarative experiment description; see README for the grammar.
struct ExperimentConfig {
  ExperimentPreset preset = ExperimentPreset::exp1;
  std::filesystem::path output;
  std::uint64_t seed = 0;
  std::uint64_t shuffle_seed = 0;
  int folds = 8;
  std::vector<double> beta_grid = default_beta_grid();

  std::vector<std::pair<std::string, std::filesystem::path>> features;
  std::vector<std::pair<std::string, std::filesystem::path>> targets;

  std::optional<std::filesystem::path> dissimilarities;
  MdsOptions mds;      // dims used by exp2
  int min_dims = 1;    // exp3 sweep
  int max_dims = 10;

  /// Relative paths in the file are resolved against its directory.
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Throws Config if a referenced input is missing or the preset lacks
  /// what it needs.
  void validate() const;
};

struct ExperimentResult {
  std::vector<EvaluationReport> summary;  // table-shaped rows
  std::vector<EvaluationReport> sweeps;   // every lasso grid entry
  std::vector<bool> sweep_best;
  std::vector<std::filesystem::path> written;
};

/// Runs a preset. All files go to config.output: report.csv, sweeps.csv and,
/// when spaces are built from dissimilarities, their configurations and
/// scree.csv.
///   exp1: one target space; {linear, best lasso} x features x
///         {correct, shuffled}.
///   exp2: first feature space against every target space (supplied ones
///         plus metric and nonmetric SMACOF at mds.dims).
///   exp3: first feature space against nonmetric SMACOF spaces for
///         t = min_dims..max_dims.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace simspace
