#include <cmath>
#include <limits>
#include <string>

#include "chebdea/error.hpp"
#include "chebdea/partition.hpp"

namespace chebdea {

bool Interval::contains(double v) const {
  const bool above = lo_closed ? v >= lo : v > lo;
  const bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

const std::vector<CategoryRule>& expert_rules() {
  static const std::vector<CategoryRule> rules = [] {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double population_edges[] = {0.0, 200.0, 500.0, 1000.0, 2000.0, inf};
    const Interval near{0.0, 15.0, false, false};
    const Interval far{15.0, inf, true, false};
    std::vector<CategoryRule> out;
    int number = 1;
    const auto label = [&] {
      std::string digits = std::to_string(number++);
      return "E" + std::string(digits.size() < 2 ? 1 : 0, '0') + digits;
    };
    for (int b = 0; b < 5; ++b) {
      const Interval pop{population_edges[b], population_edges[b + 1], true, false};
      out.push_back({label(), pop, near});
      out.push_back({label(), pop, far});
    }
    out.push_back({label(), Interval{0.0, inf, true, false}, Interval{0.0, 0.0, true, true}});
    return out;
  }();
  return rules;
}

std::string assign_expert_category(double population, double distance) {
  if (!(population > 0.0) || std::isnan(population)) {
    throw DomainError("expert categories need a positive population");
  }
  if (!(distance >= 0.0) || std::isnan(distance)) {
    throw DomainError("expert categories need a nonnegative distance");
  }
  const CategoryRule* match = nullptr;
  for (const auto& rule : expert_rules()) {
    if (rule.population.contains(population) && rule.distance.contains(distance)) {
      if (match) throw DomainError("expert rules overlap at (" + std::to_string(population) + ", " +
                                   std::to_string(distance) + ")");
      match = &rule;
    }
  }
  if (!match) {
    throw DomainError("no expert rule covers (" + std::to_string(population) + ", " +
                      std::to_string(distance) + ")");
  }
  return match->label;
}

}  // namespace chebdea
