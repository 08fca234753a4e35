#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chebdea/dea.hpp"
#include "chebdea/partition.hpp"
#include "chebdea/records.hpp"
#include "chebdea/second_stage.hpp"

namespace chebdea {

enum class CategorizationMode { None, Tree, Expert, Both };

CategorizationMode parse_mode(const std::string& text);
std::string to_string(CategorizationMode mode);

struct PipelineConfig {
  CategorizationMode mode = CategorizationMode::Both;
  ReturnsToScale rts = ReturnsToScale::Variable;
  ScoringMethod method = ScoringMethod::Linear;
  double epsilon = kDefaultLogitEpsilon;
  TreeOptions tree;
  bool tree_uses_density = false;
  DensityOptions density;
  int threads = 0;
};

// One vector of efficiency scores with its second-stage products.
struct ScoreSet {
  std::string name;  // "preliminary", "tree", "expert"
  std::vector<EfficiencyScore> scores;
  TransformedScores transformed;
  ScoreSummary summary;
  std::optional<RegressionFit> regression;  // absent when the design cannot be fitted
  DensityCurve density;
};

struct CategoryRow {
  std::string label;
  std::string rule;
  std::size_t count = 0;
  ScoreSummary preliminary;
  ScoreSummary separated;
};

struct CategoryTable {
  std::string scheme;  // "tree" or "expert"
  CategoryAssignment assignment;
  std::vector<CategoryRow> rows;  // sorted by label
};

struct PipelineReport {
  PipelineConfig config;
  std::size_t raw_record_count = 0;
  PreparedData data;
  std::vector<std::string> warnings;
  std::vector<ScoreSet> score_sets;  // preliminary first, then tree, then expert
  std::optional<TreeFit> tree;
  std::optional<CategoryTable> tree_categories;
  std::optional<CategoryTable> expert_categories;
  // correlations[a][b] between score_sets[a] and score_sets[b]; unit diagonal.
  std::vector<std::vector<double>> correlations;

  const ScoreSet& set(const std::string& name) const;
};

// Preliminary scoring, environmental regression, optional tree / expert separation with
// re-scoring, correlations, and density curves. Component errors are rethrown with the
// failing stage prefixed to the message, keeping their type.
PipelineReport run_pipeline(const std::vector<LibraryRecord>& records, const PipelineConfig& config);

// Human-readable leaf rules of a fitted tree, keyed by leaf label.
std::vector<std::pair<std::string, std::string>> describe_leaves(const RegressionTree& tree);

// CSV tables (scores, regression, categories_*, correlations, density, drop_log), tree.txt,
// and summary.txt. Output is a deterministic function of the report.
void write_report(const std::filesystem::path& dir, const PipelineReport& report);

void write_scores_csv(std::ostream& out, const PipelineReport& report);
void write_regression_csv(std::ostream& out, const PipelineReport& report);
void write_categories_csv(std::ostream& out, const CategoryTable& table);
void write_correlations_csv(std::ostream& out, const PipelineReport& report);
void write_density_csv(std::ostream& out, const PipelineReport& report);
void write_drop_log_csv(std::ostream& out, const PipelineReport& report);
void write_summary(std::ostream& out, const PipelineReport& report);

}  // namespace chebdea
