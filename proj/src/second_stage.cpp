#include "chebdea/second_stage.hpp"

#include <Eigen/QR>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "chebdea/error.hpp"

namespace chebdea {

double logit_transform(double score, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("logit epsilon must lie in (0, 1)");
  if (!(score >= 0.0 && score <= 2.0)) {
    throw DomainError("efficiency score " + std::to_string(score) + " outside [0, 2]");
  }
  const double c = std::clamp(score, epsilon, 2.0 - epsilon);
  // 2 - c cancels badly at the upper clamp; use epsilon directly there.
  const double rest = score >= 2.0 - epsilon ? epsilon : 2.0 - c;
  return std::log(c / rest);
}

double inverse_logit(double transformed) { return 2.0 / (1.0 + std::exp(-transformed)); }

TransformedScores logit_transform_all(std::span<const double> scores, double epsilon) {
  TransformedScores out;
  out.values.reserve(scores.size());
  for (double s : scores) {
    if (s < epsilon || s > 2.0 - epsilon) ++out.clamped;
    out.values.push_back(logit_transform(s, epsilon));
  }
  return out;
}

DesignMatrix build_design_matrix(std::span<const double> population,
                                 std::span<const double> distance) {
  if (population.size() != distance.size()) {
    throw InputError("population and distance vectors differ in length");
  }
  const auto n = static_cast<Eigen::Index>(population.size());
  DesignMatrix z;
  z.column_labels = {"Intercept", "ln(p)", "1/ln(p)", "t/p"};
  z.values.resize(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = population[static_cast<std::size_t>(i)];
    const double t = distance[static_cast<std::size_t>(i)];
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw DomainError("population must exceed 1 for the ln-based regressors (row " +
                        std::to_string(i) + ", p = " + std::to_string(p) + ")");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw DomainError("distance must be finite and nonnegative (row " + std::to_string(i) + ")");
    }
    const double lp = std::log(p);
    z.values(i, 0) = 1.0;
    z.values(i, 1) = lp;
    z.values(i, 2) = 1.0 / lp;
    z.values(i, 3) = t / p;
  }
  return z;
}

RegressionFit ols_fit(const DesignMatrix& design, std::span<const double> y) {
  const auto n = design.values.rows();
  const auto m = design.values.cols();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw InputError("response length " + std::to_string(y.size()) +
                     " does not match design rows " + std::to_string(n));
  }
  if (n <= m) {
    throw InputError("OLS needs more observations (" + std::to_string(n) + ") than regressors (" +
                     std::to_string(m) + ")");
  }
  if (!design.values.allFinite()) throw InputError("design matrix has non-finite entries");
  const Eigen::Map<const Eigen::VectorXd> response(y.data(), n);
  if (!response.allFinite()) throw InputError("response has non-finite entries");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.values);
  qr.setThreshold(1e-10);
  if (qr.rank() < m) {
    std::string names;
    for (Eigen::Index k = qr.rank(); k < m; ++k) {
      const auto col = static_cast<std::size_t>(qr.colsPermutation().indices()[k]);
      if (!names.empty()) names += ", ";
      names += col < design.column_labels.size() ? design.column_labels[col]
                                                  : "column " + std::to_string(col);
    }
    throw SingularDesignError("design matrix is rank deficient; collinear column(s): " + names);
  }

  RegressionFit fit;
  fit.labels = design.column_labels;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.beta = qr.solve(response);
  fit.residuals = response - design.values * fit.beta;

  const double ssr = fit.residuals.squaredNorm();
  const double mean = response.mean();
  const double sst = (response.array() - mean).square().sum();
  const auto dof = static_cast<double>(n - m);
  fit.sigma2_hat = ssr / dof;
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 0.0;

  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));

  fit.std_errors.resize(m);
  fit.t_stats.resize(m);
  fit.p_values.resize(m);
  const boost::math::students_t dist(dof);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto col = qr.colsPermutation().indices()[k];
    fit.std_errors(col) = std::sqrt(fit.sigma2_hat * r_inv.row(k).squaredNorm());
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const double se = fit.std_errors(k);
    if (se > 0.0) {
      fit.t_stats(k) = fit.beta(k) / se;
      fit.p_values(k) =
          std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(fit.t_stats(k)))));
    } else {
      fit.t_stats(k) = fit.beta(k) == 0.0 ? 0.0 : std::copysign(INFINITY, fit.beta(k));
      fit.p_values(k) = fit.beta(k) == 0.0 ? 1.0 : 0.0;
    }
  }
  return fit;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("correlation vectors differ in length");
  if (a.size() < 2) throw DomainError("correlation needs at least two observations");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DomainError("correlation undefined for a constant vector");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> score_values(std::span<const EfficiencyScore> scores) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.score);
  return out;
}

ScoreSummary summarize_scores(std::span<const double> scores) {
  if (scores.empty()) throw InputError("cannot summarize an empty score list");
  ScoreSummary s;
  s.count = scores.size();
  std::size_t inefficient = 0;
  double total = 0.0;
  for (double v : scores) {
    if (v < 1.0) ++inefficient;
    total += v;
  }
  const double n = static_cast<double>(scores.size());
  s.share_inefficient = static_cast<double>(inefficient) / n;
  s.mean = total / n;
  s.median = median(std::vector<double>(scores.begin(), scores.end()));
  return s;
}

ScoreSummary summarize_scores(std::span<const EfficiencyScore> scores) {
  const auto values = score_values(scores);
  return summarize_scores(std::span<const double>(values));
}

}  // namespace chebdea
