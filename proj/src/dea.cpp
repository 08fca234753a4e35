#include "chebdea/dea.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "chebdea/error.hpp"

namespace chebdea {

namespace {

// Solver noise below this is treated as an exact zero delta (weakly efficient units).
constexpr double kDeltaSnap = 1e-12;

void check_index(const Panel& panel, std::size_t i) {
  if (i >= panel.size()) {
    throw InputError("DMU index " + std::to_string(i) + " out of range for panel of " +
                     std::to_string(panel.size()));
  }
}

void check_matrix(const RowMatrix& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError(std::string(what) + " entry (" + std::to_string(i) + ", " +
                         std::to_string(j) + ") must be finite and nonnegative");
      }
    }
  }
}

bool feasible_at(const Panel& panel, std::size_t i, ReturnsToScale rts, double delta) {
  const auto solution = solve_lp(build_chebyshev_feasibility_lp(panel, i, rts, delta));
  if (solution.status == LpStatus::Unbounded) {
    throw NumericalError("feasibility LP reported unbounded with a zero objective");
  }
  return solution.optimal();
}

}  // namespace

Panel::Panel(std::vector<std::string> dmu_ids, RowMatrix inputs, RowMatrix outputs)
    : ids_(std::move(dmu_ids)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (ids_.empty()) throw InputError("panel must contain at least one DMU");
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (inputs_.rows() != n || outputs_.rows() != n) {
    throw InputError("panel input/output row counts must equal the number of DMU ids");
  }
  if (inputs_.cols() < 1) throw InputError("panel needs at least one input");
  if (outputs_.cols() < 1) throw InputError("panel needs at least one output");
  check_matrix(inputs_, "input");
  check_matrix(outputs_, "output");
}

Panel Panel::subset(const std::vector<std::size_t>& members) const {
  std::vector<std::string> ids;
  RowMatrix x(static_cast<Eigen::Index>(members.size()), inputs_.cols());
  RowMatrix y(static_cast<Eigen::Index>(members.size()), outputs_.cols());
  for (std::size_t k = 0; k < members.size(); ++k) {
    check_index(*this, members[k]);
    const auto row = static_cast<Eigen::Index>(members[k]);
    ids.push_back(ids_[members[k]]);
    x.row(static_cast<Eigen::Index>(k)) = inputs_.row(row);
    y.row(static_cast<Eigen::Index>(k)) = outputs_.row(row);
  }
  return Panel(std::move(ids), std::move(x), std::move(y));
}

EfficiencyScore make_score(std::string dmu_id, double delta) {
  if (std::abs(delta) < kDeltaSnap) delta = 0.0;
  delta = std::clamp(delta, -0.5, 0.5);
  EfficiencyScore s;
  s.dmu_id = std::move(dmu_id);
  s.delta = delta;
  s.score = 1.0 + 2.0 * delta;
  s.classification = s.score < 1.0 ? Classification::Inefficient : Classification::Efficient;
  return s;
}

LpProblem build_chebyshev_lp(const Panel& panel, std::size_t i, ReturnsToScale rts) {
  check_index(panel, i);
  const std::size_t r = panel.input_count();
  const std::size_t s = panel.output_count();
  const bool vrs = rts == ReturnsToScale::Variable;
  const std::size_t nu0 = 1;
  const std::size_t mu0 = 1 + r;
  const std::size_t phi = 1 + r + s;
  const std::size_t nvars = phi + (vrs ? 1 : 0);

  const auto& x = panel.inputs();
  const auto& y = panel.outputs();
  const auto row_i = static_cast<Eigen::Index>(i);

  LpProblem p;
  p.sense = Sense::Maximize;
  p.objective.assign(nvars, 0.0);
  p.objective[0] = 1.0;
  p.bounds.assign(nvars, VariableBound::NonNegative);
  p.bounds[0] = VariableBound::Free;
  if (vrs) p.bounds[phi] = VariableBound::Free;
  p.constraints.reserve(panel.size() + 1);

  // y_i' mu - phi - 2 delta >= 1
  {
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::GreaterEqual, 1.0};
    c.coefficients[0] = -2.0;
    for (std::size_t k = 0; k < s; ++k) c.coefficients[mu0 + k] = y(row_i, static_cast<Eigen::Index>(k));
    if (vrs) c.coefficients[phi] = -1.0;
    p.constraints.push_back(std::move(c));
  }
  // x_i' nu + 2 delta <= 1
  {
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::LessEqual, 1.0};
    c.coefficients[0] = 2.0;
    for (std::size_t k = 0; k < r; ++k) c.coefficients[nu0 + k] = x(row_i, static_cast<Eigen::Index>(k));
    p.constraints.push_back(std::move(c));
  }
  // Y_j mu - X_j nu - phi <= 0 for every peer j != i
  for (std::size_t j = 0; j < panel.size(); ++j) {
    if (j == i) continue;
    const auto row_j = static_cast<Eigen::Index>(j);
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::LessEqual, 0.0};
    for (std::size_t k = 0; k < r; ++k) c.coefficients[nu0 + k] = -x(row_j, static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < s; ++k) c.coefficients[mu0 + k] = y(row_j, static_cast<Eigen::Index>(k));
    if (vrs) c.coefficients[phi] = -1.0;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

LpProblem build_chebyshev_feasibility_lp(const Panel& panel, std::size_t i, ReturnsToScale rts,
                                         double delta) {
  check_index(panel, i);
  const std::size_t r = panel.input_count();
  const std::size_t s = panel.output_count();
  const bool vrs = rts == ReturnsToScale::Variable;
  const std::size_t mu0 = r;
  const std::size_t phi = r + s;
  const std::size_t nvars = phi + (vrs ? 1 : 0);
  const double shrink = 1.0 - delta;
  const double grow = 1.0 + delta;

  const auto& x = panel.inputs();
  const auto& y = panel.outputs();
  const auto row_i = static_cast<Eigen::Index>(i);

  LpProblem p;
  p.objective.assign(nvars, 0.0);
  p.bounds.assign(nvars, VariableBound::NonNegative);
  if (vrs) p.bounds[phi] = VariableBound::Free;

  // (1 - delta) y_i' mu - phi >= 1
  {
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::GreaterEqual, 1.0};
    for (std::size_t k = 0; k < s; ++k) c.coefficients[mu0 + k] = shrink * y(row_i, static_cast<Eigen::Index>(k));
    if (vrs) c.coefficients[phi] = -1.0;
    p.constraints.push_back(std::move(c));
  }
  // (1 + delta) x_i' nu <= 1
  {
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::LessEqual, 1.0};
    for (std::size_t k = 0; k < r; ++k) c.coefficients[k] = grow * x(row_i, static_cast<Eigen::Index>(k));
    p.constraints.push_back(std::move(c));
  }
  // (1 + delta) Y_j mu - (1 - delta) X_j nu - phi <= 0
  for (std::size_t j = 0; j < panel.size(); ++j) {
    if (j == i) continue;
    const auto row_j = static_cast<Eigen::Index>(j);
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::LessEqual, 0.0};
    for (std::size_t k = 0; k < r; ++k) c.coefficients[k] = -shrink * x(row_j, static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < s; ++k) c.coefficients[mu0 + k] = grow * y(row_j, static_cast<Eigen::Index>(k));
    if (vrs) c.coefficients[phi] = -1.0;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

EfficiencyScore chebyshev_score_linear(const Panel& panel, std::size_t i, ReturnsToScale rts) {
  const auto solution = solve_lp(build_chebyshev_lp(panel, i, rts));
  if (!solution.optimal()) {
    // delta = -1/2 with zero weights is always feasible and delta <= 1/2 always holds.
    throw NumericalError("Chebyshev LP for DMU '" + panel.ids()[i] +
                         "' did not reach an optimum");
  }
  return make_score(panel.ids()[i], solution.values[0]);
}

EfficiencyScore chebyshev_score_exact(const Panel& panel, std::size_t i, ReturnsToScale rts,
                                      const BisectionOptions& options) {
  check_index(panel, i);
  double lo = -0.5;
  double hi = 0.5;
  if (feasible_at(panel, i, rts, hi)) return make_score(panel.ids()[i], hi);
  if (!feasible_at(panel, i, rts, lo)) return make_score(panel.ids()[i], lo);
  for (int it = 0; it < options.max_iterations && hi - lo > options.tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(panel, i, rts, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return make_score(panel.ids()[i], lo);
}

double classical_efficiency(const Panel& panel, std::size_t i, ReturnsToScale rts) {
  check_index(panel, i);
  const std::size_t r = panel.input_count();
  const std::size_t s = panel.output_count();
  const auto& x = panel.inputs();
  const auto& y = panel.outputs();
  const auto row_i = static_cast<Eigen::Index>(i);
  for (std::size_t k = 0; k < r; ++k) {
    if (!(x(row_i, static_cast<Eigen::Index>(k)) > 0.0)) {
      throw DomainError("classical DEA needs strictly positive inputs; DMU '" + panel.ids()[i] +
                        "' has a zero input, use the Chebyshev model instead");
    }
  }

  // Variables: v (r), u (s), u0 (free, VRS only). max u'y_i - u0.
  const bool vrs = rts == ReturnsToScale::Variable;
  const std::size_t u0 = r + s;
  const std::size_t nvars = u0 + (vrs ? 1 : 0);
  LpProblem p;
  p.objective.assign(nvars, 0.0);
  for (std::size_t k = 0; k < s; ++k) p.objective[r + k] = y(row_i, static_cast<Eigen::Index>(k));
  if (vrs) p.objective[u0] = -1.0;
  p.bounds.assign(nvars, VariableBound::NonNegative);
  if (vrs) p.bounds[u0] = VariableBound::Free;

  LpConstraint normalization{std::vector<double>(nvars, 0.0), Relation::Equal, 1.0};
  for (std::size_t k = 0; k < r; ++k) normalization.coefficients[k] = x(row_i, static_cast<Eigen::Index>(k));
  p.constraints.push_back(std::move(normalization));
  for (std::size_t j = 0; j < panel.size(); ++j) {
    const auto row_j = static_cast<Eigen::Index>(j);
    LpConstraint c{std::vector<double>(nvars, 0.0), Relation::LessEqual, 0.0};
    for (std::size_t k = 0; k < r; ++k) c.coefficients[k] = -x(row_j, static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < s; ++k) c.coefficients[r + k] = y(row_j, static_cast<Eigen::Index>(k));
    if (vrs) c.coefficients[u0] = -1.0;
    p.constraints.push_back(std::move(c));
  }

  const auto solution = solve_lp(p);
  if (!solution.optimal()) {
    throw NumericalError("classical DEA LP for DMU '" + panel.ids()[i] +
                         "' did not reach an optimum");
  }
  return std::min(solution.objective_value, 1.0);
}

EfficiencyScore score_dmu(const Panel& panel, std::size_t i, ReturnsToScale rts,
                          ScoringMethod method) {
  return method == ScoringMethod::Linear ? chebyshev_score_linear(panel, i, rts)
                                         : chebyshev_score_exact(panel, i, rts);
}

std::vector<EfficiencyScore> score_all_serial(const Panel& panel, ReturnsToScale rts,
                                              ScoringMethod method) {
  std::vector<EfficiencyScore> scores;
  scores.reserve(panel.size());
  for (std::size_t i = 0; i < panel.size(); ++i) scores.push_back(score_dmu(panel, i, rts, method));
  return scores;
}

std::vector<EfficiencyScore> score_all(const Panel& panel, ReturnsToScale rts,
                                       ScoringMethod method, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(panel.size());
  std::vector<EfficiencyScore> scores(panel.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();

  // Exceptions cannot cross the parallel region; keep the first by DMU index.
  std::vector<std::exception_ptr> errors(panel.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(team)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      scores[static_cast<std::size_t>(i)] = score_dmu(panel, static_cast<std::size_t>(i), rts, method);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return scores;
}

std::string to_string(ReturnsToScale rts) {
  return rts == ReturnsToScale::Variable ? "vrs" : "crs";
}

std::string to_string(ScoringMethod method) {
  return method == ScoringMethod::Linear ? "linear" : "exact";
}

std::string to_string(Classification c) {
  return c == Classification::Efficient ? "efficient" : "inefficient";
}

}  // namespace chebdea
