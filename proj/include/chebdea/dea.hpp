#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

#include "chebdea/lp.hpp"

namespace chebdea {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Decision making units with nonnegative inputs X (n x r) and outputs Y (n x s).
// Row i of both matrices belongs to dmu_ids[i]. Immutable after construction.
class Panel {
 public:
  // Throws InputError on shape mismatch, empty dimensions, or negative/non-finite entries.
  Panel(std::vector<std::string> dmu_ids, RowMatrix inputs, RowMatrix outputs);

  std::size_t size() const { return ids_.size(); }
  std::size_t input_count() const { return static_cast<std::size_t>(inputs_.cols()); }
  std::size_t output_count() const { return static_cast<std::size_t>(outputs_.cols()); }

  const std::vector<std::string>& ids() const { return ids_; }
  const RowMatrix& inputs() const { return inputs_; }
  const RowMatrix& outputs() const { return outputs_; }

  // Rows `members` (in the given order) as a new panel.
  Panel subset(const std::vector<std::size_t>& members) const;

 private:
  std::vector<std::string> ids_;
  RowMatrix inputs_;
  RowMatrix outputs_;
};

enum class ReturnsToScale { Variable, Constant };
enum class ScoringMethod { Linear, Exact };
enum class Classification { Efficient, Inefficient };

struct EfficiencyScore {
  std::string dmu_id;
  double delta = 0.0;  // optimal uniform relative perturbation, in [-0.5, 0.5]
  double score = 1.0;  // 1 + 2 * delta, in [0, 2]
  Classification classification = Classification::Efficient;
};

// Builds the score record; clamps delta into [-0.5, 0.5] and classifies score < 1 as inefficient.
EfficiencyScore make_score(std::string dmu_id, double delta);

// Linearized Chebyshev-distance model for DMU i. Variable order:
//   delta (free), input weights (r, >= 0), output weights (s, >= 0), vrs shift (free, VRS only).
// Rows: own-output row, own-input row, then one envelopment row per peer in panel order.
LpProblem build_chebyshev_lp(const Panel& panel, std::size_t i, ReturnsToScale rts);

// Fixed-delta feasibility system of the nonlinear Chebyshev model (zero objective).
// Variables: input weights (r), output weights (s), vrs shift (free, VRS only).
LpProblem build_chebyshev_feasibility_lp(const Panel& panel, std::size_t i, ReturnsToScale rts,
                                         double delta);

EfficiencyScore chebyshev_score_linear(const Panel& panel, std::size_t i, ReturnsToScale rts);

struct BisectionOptions {
  double tolerance = 1e-7;
  int max_iterations = 60;
};

// Nonlinear model solved by bisection on delta over [-0.5, 0.5]; feasibility of the
// fixed-delta system is monotone non-increasing in delta.
EfficiencyScore chebyshev_score_exact(const Panel& panel, std::size_t i, ReturnsToScale rts,
                                      const BisectionOptions& options = {});

// Input-oriented CCR (Constant) / BCC (Variable) multiplier model. Requires strictly positive
// inputs for DMU i; throws DomainError otherwise.
double classical_efficiency(const Panel& panel, std::size_t i, ReturnsToScale rts);

EfficiencyScore score_dmu(const Panel& panel, std::size_t i, ReturnsToScale rts,
                          ScoringMethod method);

// One score per DMU in panel order. OpenMP-parallel over DMUs; `threads` = 0 uses the runtime
// default. Output is bit-identical to score_all_serial.
std::vector<EfficiencyScore> score_all(const Panel& panel, ReturnsToScale rts,
                                       ScoringMethod method, int threads = 0);

// Single-threaded reference for score_all.
std::vector<EfficiencyScore> score_all_serial(const Panel& panel, ReturnsToScale rts,
                                              ScoringMethod method);

std::string to_string(ReturnsToScale rts);
std::string to_string(ScoringMethod method);
std::string to_string(Classification c);

}  // namespace chebdea
