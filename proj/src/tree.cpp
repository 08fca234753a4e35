#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "chebdea/csv.hpp"
#include "chebdea/error.hpp"
#include "chebdea/partition.hpp"

namespace chebdea {

namespace {

struct NodeStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sse = 0.0;
};

NodeStats stats_of(std::span<const double> target, std::span<const std::size_t> members) {
  NodeStats s;
  s.count = members.size();
  if (members.empty()) return s;
  double sum = 0.0;
  for (auto i : members) sum += target[i];
  s.mean = sum / static_cast<double>(members.size());
  for (auto i : members) s.sse += (target[i] - s.mean) * (target[i] - s.mean);
  return s;
}

std::string leaf_label(const std::string& prefix, std::size_t index, std::size_t total) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::max<std::size_t>(2, std::to_string(total).size());
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

class TreeGrower {
 public:
  TreeGrower(const FeatureTable& features, std::span<const double> target, const TreeOptions& options)
      : features_(features), target_(target), options_(options) {}

  std::vector<TreeNode> grow(std::vector<std::size_t> all) {
    build(std::move(all), 0);
    return std::move(nodes_);
  }

 private:
  int build(std::vector<std::size_t> members, std::size_t depth) {
    const auto stats = stats_of(target_, members);
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.back().count = stats.count;
    nodes_.back().mean = stats.mean;
    nodes_.back().sse = stats.sse;
    if (depth >= options_.max_depth) return index;

    const auto split = best_split(features_, target_, members, options_.min_bucket);
    if (!split.found) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto& column = features_.columns[split.feature];
    for (auto i : members) (column[i] < split.threshold ? left : right).push_back(i);
    members.clear();
    members.shrink_to_fit();

    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.improvement = split.improvement;
    node.left = l;
    node.right = r;
    return index;
  }

  const FeatureTable& features_;
  std::span<const double> target_;
  const TreeOptions& options_;
  std::vector<TreeNode> nodes_;
};

// Rebuilds the node array in preorder from the root, dropping unreachable nodes.
std::vector<TreeNode> compact(const std::vector<TreeNode>& nodes) {
  std::vector<TreeNode> out;
  std::function<int(int)> visit = [&](int i) -> int {
    const int index = static_cast<int>(out.size());
    out.push_back(nodes[static_cast<std::size_t>(i)]);
    if (!out.back().leaf) {
      const int l = visit(nodes[static_cast<std::size_t>(i)].left);
      const int r = visit(nodes[static_cast<std::size_t>(i)].right);
      out[static_cast<std::size_t>(index)].left = l;
      out[static_cast<std::size_t>(index)].right = r;
    } else {
      out.back().left = out.back().right = -1;
    }
    return index;
  };
  visit(0);
  return out;
}

void prune_to(std::vector<TreeNode>& nodes, std::size_t n_leaves) {
  const auto count_leaves = [&] {
    std::size_t leaves = 0;
    std::function<void(int)> walk = [&](int i) {
      const auto& node = nodes[static_cast<std::size_t>(i)];
      if (node.leaf) {
        ++leaves;
      } else {
        walk(node.left);
        walk(node.right);
      }
    };
    walk(0);
    return leaves;
  };
  std::size_t leaves = count_leaves();
  while (leaves > n_leaves) {
    // Weakest link: the split with the smallest improvement among splits whose children
    // are both leaves. Lower node index wins ties.
    int weakest = -1;
    std::function<void(int)> walk = [&](int i) {
      const auto& node = nodes[static_cast<std::size_t>(i)];
      if (node.leaf) return;
      const bool prunable = nodes[static_cast<std::size_t>(node.left)].leaf &&
                            nodes[static_cast<std::size_t>(node.right)].leaf;
      if (prunable && (weakest < 0 || node.improvement < nodes[static_cast<std::size_t>(weakest)].improvement ||
                       (node.improvement == nodes[static_cast<std::size_t>(weakest)].improvement && i < weakest))) {
        weakest = i;
      }
      walk(node.left);
      walk(node.right);
    };
    walk(0);
    auto& node = nodes[static_cast<std::size_t>(weakest)];
    node.leaf = true;
    node.improvement = 0.0;
    --leaves;
  }
}

void label_leaves(std::vector<TreeNode>& nodes, const std::string& prefix) {
  std::vector<int> order;
  std::function<void(int)> walk = [&](int i) {
    const auto& node = nodes[static_cast<std::size_t>(i)];
    if (node.leaf) {
      order.push_back(i);
    } else {
      walk(node.left);
      walk(node.right);
    }
  };
  walk(0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    nodes[static_cast<std::size_t>(order[k])].label = leaf_label(prefix, k + 1, order.size());
  }
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw InputError("tree file: cannot parse number '" + text + "'");
  }
  return value;
}

std::string value_of(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) {
    throw InputError("tree file: expected '" + key + "=' but found '" + token + "'");
  }
  return token.substr(key.size() + 1);
}

}  // namespace

std::vector<double> FeatureTable::row(std::size_t i) const {
  std::vector<double> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c[i]);
  return out;
}

RegressionTree::RegressionTree(std::vector<std::string> feature_names, std::vector<TreeNode> nodes)
    : feature_names_(std::move(feature_names)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InputError("regression tree needs at least one node");
}

std::size_t RegressionTree::leaf_count() const { return leaves().size(); }

std::size_t RegressionTree::depth() const {
  std::function<std::size_t(int)> walk = [&](int i) -> std::size_t {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.leaf) return 0;
    return 1 + std::max(walk(node.left), walk(node.right));
  };
  return walk(0);
}

std::vector<const TreeNode*> RegressionTree::leaves() const {
  std::vector<const TreeNode*> out;
  std::function<void(int)> walk = [&](int i) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.leaf) {
      out.push_back(&node);
    } else {
      walk(node.left);
      walk(node.right);
    }
  };
  walk(0);
  return out;
}

SplitChoice best_split(const FeatureTable& features, std::span<const double> target,
                       std::span<const std::size_t> members, std::size_t min_bucket) {
  SplitChoice best;
  const std::size_t n = members.size();
  const std::size_t bucket = std::max<std::size_t>(min_bucket, 1);
  if (n < 2 * bucket) return best;

  const double first = target[members.front()];
  if (std::all_of(members.begin(), members.end(), [&](std::size_t i) { return target[i] == first; })) {
    return best;
  }
  const auto stats = stats_of(target, members);

  std::vector<std::size_t> order(members.begin(), members.end());
  std::vector<double> prefix(n + 1);
  for (std::size_t k = 0; k < features.feature_count(); ++k) {
    const auto& column = features.columns[k];
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return column[a] < column[b] || (column[a] == column[b] && a < b);
    });
    prefix[0] = 0.0;
    for (std::size_t t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + (target[order[t]] - stats.mean);
    const double total = prefix[n];
    const double base = total * total / static_cast<double>(n);
    for (std::size_t t = bucket; t + bucket <= n; ++t) {
      const double lo = column[order[t - 1]];
      const double hi = column[order[t]];
      if (!(lo < hi)) continue;
      const double sl = prefix[t];
      const double sr = total - sl;
      const double improvement = sl * sl / static_cast<double>(t) +
                                 sr * sr / static_cast<double>(n - t) - base;
      if (improvement > best.improvement) {
        double threshold = 0.5 * (lo + hi);
        if (!(threshold > lo)) threshold = hi;
        best.found = true;
        best.feature = k;
        best.threshold = threshold;
        best.improvement = improvement;
      }
    }
  }
  return best;
}

TreeFit fit_regression_tree(const FeatureTable& features, std::span<const double> target,
                            const TreeOptions& options) {
  if (features.feature_count() == 0) throw InputError("regression tree needs at least one feature");
  if (features.names.size() != features.feature_count()) {
    throw InputError("feature names and columns differ in count");
  }
  const std::size_t n = target.size();
  for (const auto& c : features.columns) {
    if (c.size() != n) throw InputError("feature column length does not match target length");
    for (double v : c) {
      if (!std::isfinite(v)) throw InputError("regression tree features must be finite");
    }
  }
  if (n == 0) throw InputError("regression tree needs at least one unit");
  for (const auto& name : features.names) {
    if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
      throw InputError("feature names must be nonempty without whitespace");
    }
  }

  TreeFit fit;
  fit.split_impossible = n < 2 * std::max<std::size_t>(options.min_bucket, 1);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto nodes = TreeGrower(features, target, options).grow(std::move(all));
  if (options.n_leaves > 0) prune_to(nodes, options.n_leaves);
  nodes = compact(nodes);
  label_leaves(nodes, options.label_prefix);
  fit.tree = RegressionTree(features.names, std::move(nodes));
  return fit;
}

std::string assign_category(const RegressionTree& tree, std::span<const double> unit_features) {
  if (unit_features.size() != tree.feature_names().size()) {
    throw InputError("unit has " + std::to_string(unit_features.size()) + " features, tree expects " +
                     std::to_string(tree.feature_names().size()));
  }
  const auto& nodes = tree.nodes();
  std::size_t i = 0;
  while (!nodes[i].leaf) {
    const auto& node = nodes[i];
    i = static_cast<std::size_t>(unit_features[node.feature] < node.threshold ? node.left : node.right);
  }
  return nodes[i].label;
}

void write_tree(std::ostream& out, const RegressionTree& tree) {
  out << "regression-tree v1\n";
  out << "features";
  for (const auto& name : tree.feature_names()) out << ' ' << name;
  out << '\n';
  const auto& nodes = tree.nodes();
  std::function<void(int, std::size_t)> walk = [&](int i, std::size_t depth) {
    const auto& node = nodes[static_cast<std::size_t>(i)];
    out << std::string(2 * depth, ' ');
    if (node.leaf) {
      out << "leaf " << node.label;
    } else {
      out << "split " << tree.feature_names()[node.feature] << ' '
          << csv::format_double(node.threshold)
          << " improvement=" << csv::format_double(node.improvement);
    }
    out << " n=" << node.count << " mean=" << csv::format_double(node.mean)
        << " sse=" << csv::format_double(node.sse) << '\n';
    if (!node.leaf) {
      walk(node.left, depth + 1);
      walk(node.right, depth + 1);
    }
  };
  walk(0, 0);
}

RegressionTree read_tree(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "regression-tree v1") {
    throw InputError("tree file: missing 'regression-tree v1' header");
  }
  if (!std::getline(in, line)) throw InputError("tree file: missing features line");
  std::istringstream features_line(line);
  std::string word;
  features_line >> word;
  if (word != "features") throw InputError("tree file: expected 'features' line");
  std::vector<std::string> names;
  while (features_line >> word) names.push_back(word);

  std::vector<TreeNode> nodes;
  std::function<int()> parse = [&]() -> int {
    std::string text;
    do {
      if (!std::getline(in, text)) throw InputError("tree file: unexpected end of input");
    } while (text.find_first_not_of(" \t\r") == std::string::npos);
    std::istringstream tokens(text);
    std::vector<std::string> parts;
    while (tokens >> word) parts.push_back(word);

    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    TreeNode node;
    std::size_t pos = 1;
    if (parts[0] == "leaf") {
      if (parts.size() != 5) throw InputError("tree file: malformed leaf line '" + text + "'");
      node.leaf = true;
      node.label = parts[pos++];
    } else if (parts[0] == "split") {
      if (parts.size() != 7) throw InputError("tree file: malformed split line '" + text + "'");
      node.leaf = false;
      const auto it = std::find(names.begin(), names.end(), parts[pos]);
      if (it == names.end()) throw InputError("tree file: unknown feature '" + parts[pos] + "'");
      node.feature = static_cast<std::size_t>(it - names.begin());
      ++pos;
      node.threshold = parse_double(parts[pos++]);
      node.improvement = parse_double(value_of(parts[pos++], "improvement"));
    } else {
      throw InputError("tree file: unknown node kind '" + parts[0] + "'");
    }
    node.count = static_cast<std::size_t>(parse_double(value_of(parts[pos++], "n")));
    node.mean = parse_double(value_of(parts[pos++], "mean"));
    node.sse = parse_double(value_of(parts[pos++], "sse"));
    if (!node.leaf) {
      node.left = parse();
      node.right = parse();
    }
    nodes[static_cast<std::size_t>(index)] = node;
    return index;
  };
  parse();
  return RegressionTree(std::move(names), std::move(nodes));
}

}  // namespace chebdea
