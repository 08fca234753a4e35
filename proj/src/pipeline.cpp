#include "chebdea/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "chebdea/csv.hpp"
#include "chebdea/error.hpp"

namespace chebdea {

namespace {

template <class F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const SingularDesignError& e) {
    throw SingularDesignError(stage + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(stage + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(stage + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(stage + ": " + e.what());
  }
}

std::string bound_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return csv::format_double(v);
}

std::string interval_text(const Interval& in) {
  if (in.lo == in.hi && in.lo_closed && in.hi_closed) return "= " + bound_text(in.lo);
  return std::string(in.lo_closed ? "[" : "(") + bound_text(in.lo) + ", " + bound_text(in.hi) +
         (in.hi_closed ? "]" : ")");
}

ScoreSet make_score_set(const std::string& name, std::vector<EfficiencyScore> scores,
                        const Environment& env, const PipelineConfig& config,
                        std::vector<std::string>& warnings) {
  ScoreSet set;
  set.name = name;
  set.scores = std::move(scores);
  const auto values = score_values(set.scores);
  set.summary = summarize_scores(values);
  set.transformed = in_stage(name + " transform", [&] { return logit_transform_all(values, config.epsilon); });
  if (set.transformed.clamped > 0) {
    warnings.push_back(name + ": " + std::to_string(set.transformed.clamped) +
                       " score(s) clamped by epsilon before the logit transform");
  }

  const auto design = in_stage(name + " regression", [&] {
    return build_design_matrix(env.population, env.distance);
  });
  if (design.rows() <= design.cols()) {
    warnings.push_back(name + ": regression skipped, " + std::to_string(design.rows()) +
                       " observation(s) for " + std::to_string(design.cols()) + " coefficients");
  } else {
    try {
      set.regression = ols_fit(design, set.transformed.values);
    } catch (const SingularDesignError& e) {
      warnings.push_back(name + ": regression skipped, " + e.what());
    }
  }
  set.density = in_stage(name + " density", [&] { return density_curve(values, config.density, config.threads); });
  return set;
}

CategoryTable make_table(const std::string& scheme, CategoryAssignment assignment,
                         const std::map<std::string, std::string>& rules,
                         const std::vector<EfficiencyScore>& preliminary,
                         const std::vector<EfficiencyScore>& separated) {
  CategoryTable table;
  table.scheme = scheme;
  for (const auto& [label, rows] : assignment.members()) {
    CategoryRow row;
    row.label = label;
    const auto it = rules.find(label);
    row.rule = it == rules.end() ? std::string() : it->second;
    row.count = rows.size();
    std::vector<double> pre;
    std::vector<double> sep;
    for (auto i : rows) {
      pre.push_back(preliminary[i].score);
      sep.push_back(separated[i].score);
    }
    row.preliminary = summarize_scores(pre);
    row.separated = summarize_scores(sep);
    table.rows.push_back(std::move(row));
  }
  table.assignment = std::move(assignment);
  return table;
}

}  // namespace

CategorizationMode parse_mode(const std::string& text) {
  if (text == "none") return CategorizationMode::None;
  if (text == "tree") return CategorizationMode::Tree;
  if (text == "expert") return CategorizationMode::Expert;
  if (text == "both") return CategorizationMode::Both;
  throw InputError("unknown categorization mode '" + text + "' (expected none, tree, expert, both)");
}

std::string to_string(CategorizationMode mode) {
  switch (mode) {
    case CategorizationMode::None: return "none";
    case CategorizationMode::Tree: return "tree";
    case CategorizationMode::Expert: return "expert";
    case CategorizationMode::Both: return "both";
  }
  return "none";
}

const ScoreSet& PipelineReport::set(const std::string& name) const {
  for (const auto& s : score_sets) {
    if (s.name == name) return s;
  }
  throw InputError("report has no score set '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> describe_leaves(const RegressionTree& tree) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& names = tree.feature_names();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(names.size(), -inf);
  std::vector<double> hi(names.size(), inf);
  std::function<void(int)> walk = [&](int index) {
    const auto& node = tree.nodes()[static_cast<std::size_t>(index)];
    if (node.leaf) {
      std::string rule;
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (std::isinf(lo[k]) && std::isinf(hi[k])) continue;
        if (!rule.empty()) rule += " & ";
        if (std::isinf(lo[k])) {
          rule += names[k] + " < " + bound_text(hi[k]);
        } else if (std::isinf(hi[k])) {
          rule += names[k] + " >= " + bound_text(lo[k]);
        } else {
          rule += bound_text(lo[k]) + " <= " + names[k] + " < " + bound_text(hi[k]);
        }
      }
      out.emplace_back(node.label, rule.empty() ? "all" : rule);
      return;
    }
    const double saved_lo = lo[node.feature];
    const double saved_hi = hi[node.feature];
    hi[node.feature] = std::min(saved_hi, node.threshold);
    walk(node.left);
    hi[node.feature] = saved_hi;
    lo[node.feature] = std::max(saved_lo, node.threshold);
    walk(node.right);
    lo[node.feature] = saved_lo;
  };
  walk(0);
  return out;
}

PipelineReport run_pipeline(const std::vector<LibraryRecord>& records, const PipelineConfig& config) {
  PipelineReport report{config, records.size(),
                        in_stage("preprocess", [&] { return preprocess(records); }),
                        {}, {}, {}, {}, {}, {}};
  const auto& data = report.data;
  const auto& env = data.environment;
  const std::size_t n = data.panel.size();

  auto preliminary = in_stage("preliminary scores", [&] {
    return score_all(data.panel, config.rts, config.method, config.threads);
  });
  report.score_sets.push_back(make_score_set("preliminary", preliminary, env, config, report.warnings));

  const bool want_tree = config.mode == CategorizationMode::Tree || config.mode == CategorizationMode::Both;
  const bool want_expert = config.mode == CategorizationMode::Expert || config.mode == CategorizationMode::Both;

  if (want_tree) {
    FeatureTable features;
    features.names = {"population", "distance"};
    features.columns = {env.population, env.distance};
    if (config.tree_uses_density) {
      features.names.push_back("density");
      features.columns.push_back(env.density);
    }
    const auto target = score_values(preliminary);
    report.tree = in_stage("tree", [&] { return fit_regression_tree(features, target, config.tree); });
    if (report.tree->split_impossible) {
      report.warnings.push_back("tree: " + std::to_string(n) + " units cannot be split with min bucket " +
                                std::to_string(config.tree.min_bucket) + "; single category");
    } else if (config.tree.n_leaves > 0 && report.tree->tree.leaf_count() < config.tree.n_leaves) {
      report.warnings.push_back("tree: grew only " + std::to_string(report.tree->tree.leaf_count()) +
                                " of the requested " + std::to_string(config.tree.n_leaves) + " leaves");
    }
    CategoryAssignment assignment;
    for (std::size_t i = 0; i < n; ++i) assignment.labels.push_back(assign_category(report.tree->tree, features.row(i)));
    auto separated = in_stage("tree separation", [&] {
      return separated_scores(data.panel, assignment, config.rts, config.method, config.threads);
    });
    const auto leaves = describe_leaves(report.tree->tree);
    report.tree_categories = make_table("tree", std::move(assignment),
                                        std::map<std::string, std::string>(leaves.begin(), leaves.end()),
                                        preliminary, separated);
    report.score_sets.push_back(make_score_set("tree", std::move(separated), env, config, report.warnings));
  }

  if (want_expert) {
    CategoryAssignment assignment;
    in_stage("expert categories", [&] {
      for (std::size_t i = 0; i < n; ++i) {
        assignment.labels.push_back(assign_expert_category(env.population[i], env.distance[i]));
      }
    });
    auto separated = in_stage("expert separation", [&] {
      return separated_scores(data.panel, assignment, config.rts, config.method, config.threads);
    });
    std::map<std::string, std::string> rules;
    for (const auto& rule : expert_rules()) {
      rules[rule.label] = "population " + interval_text(rule.population) + " & distance " +
                          interval_text(rule.distance);
    }
    report.expert_categories = make_table("expert", std::move(assignment), rules, preliminary, separated);
    report.score_sets.push_back(make_score_set("expert", std::move(separated), env, config, report.warnings));
  }

  const std::size_t k = report.score_sets.size();
  report.correlations.assign(k, std::vector<double>(k, 1.0));
  std::vector<std::vector<double>> values;
  for (const auto& s : report.score_sets) values.push_back(score_values(s.scores));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double rho = std::numeric_limits<double>::quiet_NaN();
      try {
        rho = pearson_correlation(values[a], values[b]);
      } catch (const DomainError& e) {
        report.warnings.push_back("correlation " + report.score_sets[a].name + "/" +
                                  report.score_sets[b].name + " undefined: " + e.what());
      }
      report.correlations[a][b] = rho;
      report.correlations[b][a] = rho;
    }
  }
  return report;
}

}  // namespace chebdea
