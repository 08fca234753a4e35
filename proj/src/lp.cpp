#include "chebdea/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "chebdea/error.hpp"

namespace chebdea {

namespace {

// Power-of-two factor s with max_abs * s in [0.5, 1); exact in floating point.
double power_of_two_scale(double max_abs) {
  if (max_abs == 0.0 || !std::isfinite(max_abs)) return 1.0;
  int exponent = 0;
  std::frexp(max_abs, &exponent);
  return std::ldexp(1.0, -exponent);
}

// Condensed simplex tableau. Row i encodes  x_B(i) = rhs[i] - sum_j a(i,j) * x_N(j);
// objective rows use the same layout with the objective playing the basic variable.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols, int artificial_base)
      : rows_(rows), cols_(cols), artificial_base_(artificial_base), a_(rows * cols, 0.0),
        rhs_(rows, 0.0),
        cost_(cols, 0.0), phase1_(cols, 0.0), basic_(rows, -1), nonbasic_(cols, -1),
        banned_(cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<double>& rhs() { return rhs_; }
  std::vector<double>& cost() { return cost_; }
  std::vector<double>& phase1() { return phase1_; }
  double& cost_value() { return cost_value_; }
  double& phase1_value() { return phase1_value_; }
  std::vector<int>& basic() { return basic_; }
  std::vector<int>& nonbasic() { return nonbasic_; }
  std::vector<char>& banned() { return banned_; }

  void pivot(std::size_t p, std::size_t q) {
    double* prow = &a_[p * cols_];
    const double piv = prow[q];
    prow[q] = 1.0;
    for (std::size_t j = 0; j < cols_; ++j) prow[j] /= piv;
    rhs_[p] /= piv;

    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == p) continue;
      double* row = &a_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      row[q] = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      rhs_[i] -= f * rhs_[p];
    }
    eliminate(cost_, cost_value_, prow, q, rhs_[p]);
    eliminate(phase1_, phase1_value_, prow, q, rhs_[p]);
    std::swap(basic_[p], nonbasic_[q]);
    // Artificials that leave the basis never re-enter.
    banned_[q] = nonbasic_[q] >= artificial_base_ ? 1 : 0;
  }

  void erase_row(std::size_t p) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(p * cols_),
             a_.begin() + static_cast<std::ptrdiff_t>((p + 1) * cols_));
    rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(p));
    basic_.erase(basic_.begin() + static_cast<std::ptrdiff_t>(p));
    --rows_;
  }

 private:
  void eliminate(std::vector<double>& row, double& value, const double* prow, std::size_t q,
                 double pivot_rhs) {
    const double f = row[q];
    if (f == 0.0) return;
    row[q] = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
    value -= f * pivot_rhs;
  }

  std::size_t rows_;
  std::size_t cols_;
  int artificial_base_;
  std::vector<double> a_;
  std::vector<double> rhs_;
  std::vector<double> cost_;
  double cost_value_ = 0.0;
  std::vector<double> phase1_;
  double phase1_value_ = 0.0;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  std::vector<char> banned_;
};

enum class StepResult { Optimal, Unbounded };

class SimplexRun {
 public:
  SimplexRun(Tableau& tableau, const SimplexOptions& options)
      : t_(tableau), options_(options) {}

  int iterations() const { return iterations_; }

  // Iterates on the given objective row until optimal or unbounded.
  StepResult optimize(std::vector<double>& objective) {
    for (;;) {
      if (iterations_ >= options_.max_iterations) {
        throw NumericalError("simplex: iteration limit of " +
                             std::to_string(options_.max_iterations) + " reached");
      }
      const bool bland = iterations_ >= options_.bland_after;
      const auto q = entering_column(objective, bland);
      if (!q) return StepResult::Optimal;
      const auto p = leaving_row(*q, bland);
      if (!p) return StepResult::Unbounded;
      t_.pivot(*p, *q);
      ++iterations_;
    }
  }

 private:
  using MaybeIndex = std::optional<std::size_t>;

  MaybeIndex entering_column(const std::vector<double>& objective, bool bland) const {
    MaybeIndex best;
    double best_value = -options_.optimality_tolerance;
    int best_label = std::numeric_limits<int>::max();
    for (std::size_t j = 0; j < t_.cols(); ++j) {
      if (t_.banned()[j]) continue;
      const double d = objective[j];
      if (d >= -options_.optimality_tolerance) continue;
      // Reduced costs carry rounding proportional to the column's magnitude.
      if (d >= -options_.optimality_tolerance * column_magnitude(j)) continue;
      if (bland) {
        if (t_.nonbasic()[j] < best_label) {
          best_label = t_.nonbasic()[j];
          best = j;
        }
      } else if (d < best_value) {
        best_value = d;
        best = j;
      }
    }
    return best;
  }

  double column_magnitude(std::size_t j) const {
    double m = 1.0;
    for (std::size_t i = 0; i < t_.rows(); ++i) m = std::max(m, std::abs(t_.at(i, j)));
    return m;
  }

  MaybeIndex leaving_row(std::size_t q, bool bland) const {
    MaybeIndex best;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_pivot = 0.0;
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      const double aiq = t_.at(i, q);
      if (aiq <= options_.pivot_tolerance) continue;
      const double ratio = std::max(t_.rhs()[i], 0.0) / aiq;
      bool take = ratio < best_ratio;
      if (!take && ratio == best_ratio) {
        take = bland ? t_.basic()[i] < t_.basic()[*best] : aiq > best_pivot;
      }
      if (take) {
        best = i;
        best_ratio = ratio;
        best_pivot = aiq;
      }
    }
    return best;
  }

  Tableau& t_;
  const SimplexOptions& options_;
  int iterations_ = 0;
};

}  // namespace

void validate_lp(const LpProblem& problem) {
  const std::size_t n = problem.variable_count();
  if (n == 0) throw InputError("LP has no variables");
  if (problem.bounds.size() != n) {
    throw InputError("LP bounds count " + std::to_string(problem.bounds.size()) +
                     " does not match variable count " + std::to_string(n));
  }
  for (double c : problem.objective) {
    if (!std::isfinite(c)) throw InputError("LP objective has a non-finite coefficient");
  }
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& row = problem.constraints[i];
    if (row.coefficients.size() != n) {
      throw InputError("LP constraint " + std::to_string(i) + " has " +
                       std::to_string(row.coefficients.size()) + " coefficients, expected " +
                       std::to_string(n));
    }
    if (!std::isfinite(row.rhs)) {
      throw InputError("LP constraint " + std::to_string(i) + " has a non-finite rhs");
    }
    for (double c : row.coefficients) {
      if (!std::isfinite(c)) {
        throw InputError("LP constraint " + std::to_string(i) + " has a non-finite coefficient");
      }
    }
  }
}

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
  validate_lp(problem);

  const std::size_t n = problem.variable_count();
  const std::size_t m = problem.constraints.size();

  // Column equilibration on the original variables; x = column_scale * x_scaled.
  std::vector<double> column_scale(n, 1.0);
  std::vector<double> row_scale(m, 1.0);
  if (options.equilibrate) {
    for (std::size_t j = 0; j < n; ++j) {
      double max_abs = 0.0;
      for (const auto& row : problem.constraints) max_abs = std::max(max_abs, std::abs(row.coefficients[j]));
      column_scale[j] = power_of_two_scale(max_abs);
    }
    for (std::size_t i = 0; i < m; ++i) {
      double max_abs = 0.0;
      const auto& coeffs = problem.constraints[i].coefficients;
      for (std::size_t j = 0; j < n; ++j) max_abs = std::max(max_abs, std::abs(coeffs[j] * column_scale[j]));
      row_scale[i] = power_of_two_scale(max_abs);
    }
  }

  // Free variables are split x = x+ - x-; structural label k maps to (original var, sign).
  std::vector<std::size_t> struct_var;
  std::vector<double> struct_sign;
  for (std::size_t j = 0; j < n; ++j) {
    struct_var.push_back(j);
    struct_sign.push_back(1.0);
    if (problem.bounds[j] == VariableBound::Free) {
      struct_var.push_back(j);
      struct_sign.push_back(-1.0);
    }
  }
  const std::size_t ns = struct_var.size();

  // Normalize each row to a nonnegative rhs.
  std::vector<Relation> relation(m);
  std::vector<double> flip(m, 1.0);
  std::size_t surplus_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = problem.constraints[i];
    relation[i] = row.relation;
    if (row.rhs * row_scale[i] < 0.0) {
      flip[i] = -1.0;
      if (relation[i] == Relation::LessEqual) {
        relation[i] = Relation::GreaterEqual;
      } else if (relation[i] == Relation::GreaterEqual) {
        relation[i] = Relation::LessEqual;
      }
    }
    if (relation[i] == Relation::GreaterEqual) ++surplus_count;
  }

  const int slack_base = static_cast<int>(ns);
  const int artificial_base = static_cast<int>(ns + m);
  Tableau t(m, ns + surplus_count, artificial_base);

  for (std::size_t k = 0; k < ns; ++k) t.nonbasic()[k] = static_cast<int>(k);

  std::size_t surplus_col = ns;
  bool has_artificial = false;
  double max_rhs = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = problem.constraints[i];
    const double rs = row_scale[i] * flip[i];
    for (std::size_t k = 0; k < ns; ++k) {
      const std::size_t j = struct_var[k];
      t.at(i, k) = row.coefficients[j] * column_scale[j] * rs * struct_sign[k];
    }
    t.rhs()[i] = row.rhs * rs;
    max_rhs = std::max(max_rhs, t.rhs()[i]);
    switch (relation[i]) {
      case Relation::LessEqual:
        t.basic()[i] = slack_base + static_cast<int>(i);
        break;
      case Relation::GreaterEqual:
        t.at(i, surplus_col) = -1.0;
        t.nonbasic()[surplus_col] = slack_base + static_cast<int>(i);
        ++surplus_col;
        [[fallthrough]];
      case Relation::Equal:
        t.basic()[i] = artificial_base + static_cast<int>(i);
        has_artificial = true;
        break;
    }
  }

  // Objective: maximize c'x, scaled so its largest coefficient is O(1).
  const double direction = problem.sense == Sense::Maximize ? 1.0 : -1.0;
  std::vector<double> scaled_cost(ns);
  double max_cost = 0.0;
  for (std::size_t k = 0; k < ns; ++k) {
    const std::size_t j = struct_var[k];
    scaled_cost[k] = direction * problem.objective[j] * column_scale[j] * struct_sign[k];
    max_cost = std::max(max_cost, std::abs(scaled_cost[k]));
  }
  const double cost_scale = power_of_two_scale(max_cost);
  for (std::size_t k = 0; k < ns; ++k) t.cost()[k] = -scaled_cost[k] * cost_scale;

  const auto is_artificial = [&](int label) { return label >= artificial_base; };

  SimplexRun run(t, options);
  LpSolution solution;

  if (has_artificial) {
    // Phase 1: maximize -(sum of artificials).
    double phase1_value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial(t.basic()[i])) continue;
      phase1_value -= t.rhs()[i];
      for (std::size_t j = 0; j < t.cols(); ++j) t.phase1()[j] -= t.at(i, j);
    }
    t.phase1_value() = phase1_value;

    run.optimize(t.phase1());

    const double infeasibility = -t.phase1_value();
    if (infeasibility > options.feasibility_tolerance * std::max(1.0, max_rhs)) {
      solution.status = LpStatus::Infeasible;
      solution.iterations = run.iterations();
      return solution;
    }

    // Drive remaining zero-level artificials out of the basis, dropping redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (!is_artificial(t.basic()[i])) {
        ++i;
        continue;
      }
      std::optional<std::size_t> column;
      double best = options.pivot_tolerance;
      for (std::size_t j = 0; j < t.cols(); ++j) {
        if (t.banned()[j]) continue;
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          column = j;
        }
      }
      if (column) {
        t.rhs()[i] = 0.0;
        t.pivot(i, *column);
        ++i;
      } else {
        t.erase_row(i);
      }
    }
  }

  const auto result = run.optimize(t.cost());
  solution.iterations = run.iterations();
  if (result == StepResult::Unbounded) {
    solution.status = LpStatus::Unbounded;
    return solution;
  }

  std::vector<double> struct_values(ns, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const int label = t.basic()[i];
    if (label < slack_base) struct_values[static_cast<std::size_t>(label)] = std::max(t.rhs()[i], 0.0);
  }
  solution.values.assign(n, 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    const std::size_t j = struct_var[k];
    solution.values[j] += struct_sign[k] * struct_values[k] * column_scale[j];
  }

  double objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) objective += problem.objective[j] * solution.values[j];
  solution.objective_value = objective;
  solution.status = LpStatus::Optimal;

  double worst = 0.0;
  for (const auto& row : problem.constraints) {
    double lhs = 0.0;
    double max_abs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      lhs += row.coefficients[j] * solution.values[j];
      max_abs = std::max(max_abs, std::abs(row.coefficients[j]));
    }
    double violation = 0.0;
    switch (row.relation) {
      case Relation::LessEqual: violation = std::max(0.0, lhs - row.rhs); break;
      case Relation::GreaterEqual: violation = std::max(0.0, row.rhs - lhs); break;
      case Relation::Equal: violation = std::abs(lhs - row.rhs); break;
    }
    worst = std::max(worst, max_abs > 0.0 ? violation / max_abs : violation);
  }
  solution.max_scaled_residual = worst;
  return solution;
}

}  // namespace chebdea
