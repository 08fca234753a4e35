#pragma once

#include <cstddef>
#include <vector>

namespace chebdea {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, GreaterEqual, Equal };
enum class VariableBound { NonNegative, Free };

struct LpConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

// Dense linear program: optimize objective'x subject to the constraint rows and per-variable bounds.
struct LpProblem {
  Sense sense = Sense::Maximize;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<VariableBound> bounds;

  std::size_t variable_count() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  // Defined only when status == Optimal.
  double objective_value = 0.0;
  std::vector<double> values;
  // Largest constraint violation of `values`, each row divided by its max |coefficient|.
  double max_scaled_residual = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct SimplexOptions {
  double pivot_tolerance = 1e-10;
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  // Dantzig pricing until this many pivots, Bland's rule afterwards.
  int bland_after = 500;
  int max_iterations = 200000;
  bool equilibrate = true;
};

// Throws InputError on ragged rows, mismatched bounds, or non-finite data.
void validate_lp(const LpProblem& problem);

// Two-phase dense primal simplex on a condensed (nonbasic-columns-only) tableau.
// Deterministic: identical input bits give identical output bits.
// Throws InputError for malformed problems and NumericalError if the iteration cap is hit.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

}  // namespace chebdea
