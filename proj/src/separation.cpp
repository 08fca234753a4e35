#include "chebdea/error.hpp"
#include "chebdea/partition.hpp"

namespace chebdea {

std::map<std::string, std::size_t> CategoryAssignment::sizes() const {
  std::map<std::string, std::size_t> out;
  for (const auto& label : labels) ++out[label];
  return out;
}

std::map<std::string, std::vector<std::size_t>> CategoryAssignment::members() const {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

std::vector<EfficiencyScore> separated_scores(const Panel& panel,
                                              const CategoryAssignment& assignment,
                                              ReturnsToScale rts, ScoringMethod method,
                                              int threads) {
  if (assignment.labels.size() != panel.size()) {
    throw InputError("category assignment covers " + std::to_string(assignment.labels.size()) +
                     " units but the panel has " + std::to_string(panel.size()));
  }
  std::vector<EfficiencyScore> out(panel.size());
  for (const auto& [label, rows] : assignment.members()) {
    const auto scores = score_all(panel.subset(rows), rts, method, threads);
    for (std::size_t k = 0; k < rows.size(); ++k) out[rows[k]] = scores[k];
  }
  return out;
}

}  // namespace chebdea
