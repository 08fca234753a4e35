#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chebdea/dea.hpp"

namespace chebdea {

inline constexpr double kDefaultLogitEpsilon = 1e-6;

// ln(c / (2 - c)) with c = score clamped into [epsilon, 2 - epsilon].
// Throws DomainError if score is outside [0, 2] or epsilon is not in (0, 1).
double logit_transform(double score, double epsilon = kDefaultLogitEpsilon);

// Inverse of logit_transform on the open interval: 2 / (1 + exp(-z)).
double inverse_logit(double transformed);

struct TransformedScores {
  std::vector<double> values;
  std::size_t clamped = 0;  // how many scores hit the epsilon clamp
};

TransformedScores logit_transform_all(std::span<const double> scores,
                                      double epsilon = kDefaultLogitEpsilon);

struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_labels;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

// Environmental regressors [1, ln p, 1/ln p, t/p]. Throws DomainError if any p <= 1 or t < 0,
// InputError on length mismatch.
DesignMatrix build_design_matrix(std::span<const double> population,
                                 std::span<const double> distance);

struct RegressionFit {
  std::vector<std::string> labels;
  Eigen::VectorXd beta;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_stats;
  Eigen::VectorXd p_values;
  double r_squared = 0.0;
  std::size_t n_obs = 0;
  double sigma2_hat = 0.0;
  Eigen::VectorXd residuals;
};

// Least squares with classical i.i.d. standard errors and two-sided t(n - m) p-values.
// Throws InputError if n <= m or lengths differ, SingularDesignError if Z is rank deficient.
RegressionFit ols_fit(const DesignMatrix& design, std::span<const double> y);

// Throws DomainError on n < 2, length mismatch, or a constant vector.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

// Silverman's rule 0.9 * min(sd, IQR / 1.34) * n^(-1/5), with the usual fallbacks when the
// spread estimate is zero. Throws DomainError on an empty sample.
double silverman_bandwidth(std::span<const double> sample);

// Gaussian kernel density estimate at each grid point (OpenMP over grid points).
std::vector<double> gaussian_kde(std::span<const double> sample, std::span<const double> grid,
                                 double bandwidth, int threads = 0);

// Single-threaded reference for gaussian_kde.
std::vector<double> gaussian_kde_serial(std::span<const double> sample,
                                        std::span<const double> grid, double bandwidth);

struct DensityCurve {
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};

struct DensityOptions {
  std::optional<double> bandwidth;  // Silverman when unset
  double tail_bandwidths = 4.0;     // grid spans [min - k h, max + k h]
  std::size_t min_points = 512;
  std::size_t max_points = 20000;
  double max_step_in_bandwidths = 0.25;
};

DensityCurve density_curve(std::span<const double> sample, const DensityOptions& options = {},
                           int threads = 0);

double trapezoid(std::span<const double> x, std::span<const double> y);

struct ScoreSummary {
  std::size_t count = 0;
  double share_inefficient = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

// Throws InputError on an empty input.
ScoreSummary summarize_scores(std::span<const double> scores);
ScoreSummary summarize_scores(std::span<const EfficiencyScore> scores);

std::vector<double> score_values(std::span<const EfficiencyScore> scores);

double median(std::vector<double> values);

}  // namespace chebdea
