#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chebdea/dea.hpp"

namespace chebdea {

// ---------------------------------------------------------------------------
// Regression tree

// Column-major feature table: features[k][i] is feature k of unit i.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t feature_count() const { return columns.size(); }
  std::size_t unit_count() const { return columns.empty() ? 0 : columns.front().size(); }
  std::vector<double> row(std::size_t i) const;
};

struct TreeOptions {
  std::size_t min_bucket = 138;
  std::size_t max_depth = 7;  // root has depth 0
  std::size_t n_leaves = 11;
  std::string label_prefix = "D";
};

// Internal nodes route feature < threshold to the left child, >= threshold to the right.
struct TreeNode {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  double improvement = 0.0;  // within-node SS reduction of this split
  int left = -1;
  int right = -1;
  std::size_t count = 0;
  double mean = 0.0;
  double sse = 0.0;
  std::string label;  // leaves only
};

class RegressionTree {
 public:
  RegressionTree() = default;
  RegressionTree(std::vector<std::string> feature_names, std::vector<TreeNode> nodes);

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }

  std::size_t leaf_count() const;
  std::size_t depth() const;
  // Leaves in left-to-right order.
  std::vector<const TreeNode*> leaves() const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<TreeNode> nodes_;  // nodes_[0] is the root; children are indices
};

struct TreeFit {
  RegressionTree tree;
  // Set when n < 2 * min_bucket so no split was possible.
  bool split_impossible = false;
};

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double improvement = 0.0;
};

// Best variance-reduction split over all features and midpoint thresholds with both sides
// holding at least min_bucket units. Ties go to the lower feature index, then lower threshold.
SplitChoice best_split(const FeatureTable& features, std::span<const double> target,
                       std::span<const std::size_t> members, std::size_t min_bucket);

// Greedy growth under min_bucket / max_depth, then weakest-link pruning down to n_leaves
// leaves. Leaves are labelled prefix01, prefix02, ... left to right.
TreeFit fit_regression_tree(const FeatureTable& features, std::span<const double> target,
                            const TreeOptions& options = {});

std::string assign_category(const RegressionTree& tree, std::span<const double> unit_features);

// Plain-text nested format; see README. Doubles use shortest round-trip formatting.
void write_tree(std::ostream& out, const RegressionTree& tree);
RegressionTree read_tree(std::istream& in);

// ---------------------------------------------------------------------------
// Expert rules

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = false;

  bool contains(double v) const;
};

struct CategoryRule {
  std::string label;
  Interval population;
  Interval distance;
};

// E01-E10: five population bins crossed with distance (0, 15) and [15, inf); E11: distance 0.
const std::vector<CategoryRule>& expert_rules();

// Throws DomainError if population <= 0 or distance < 0.
std::string assign_expert_category(double population, double distance);

// ---------------------------------------------------------------------------
// Separation

struct CategoryAssignment {
  std::vector<std::string> labels;  // aligned with panel rows

  std::map<std::string, std::size_t> sizes() const;
  // Panel row indices per label, in panel order.
  std::map<std::string, std::vector<std::size_t>> members() const;
};

// Scores every DMU against only the members of its own category; output in panel order.
std::vector<EfficiencyScore> separated_scores(const Panel& panel,
                                              const CategoryAssignment& assignment,
                                              ReturnsToScale rts, ScoringMethod method,
                                              int threads = 0);

}  // namespace chebdea
