#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "chebdea/csv.hpp"
#include "chebdea/error.hpp"
#include "chebdea/second_stage.hpp"
#include "chebdea/synth.hpp"

namespace chebdea {

namespace {

void check_config(const SynthConfig& c) {
  if (c.n_units < 2) throw InputError("synthetic panel needs at least 2 units");
  if (!(c.sigma2 >= 0.0)) throw InputError("sigma2 must be nonnegative");
  if (!(c.population_min >= 2.0)) throw InputError("population minimum must be at least 2");
  if (!(c.distance_max > 0.0)) throw InputError("distance maximum must be positive");
  for (double share : {c.distance_zero_share, c.zero_employees_share, c.zero_events_share,
                       c.shrinking_collection_share}) {
    if (!(share >= 0.0 && share <= 1.0)) throw InputError("shares must lie in [0, 1]");
  }
  for (double sd : {c.population_log_sd, c.density_log_sd, c.input_log_sd, c.output_log_sd}) {
    if (!(sd >= 0.0)) throw InputError("log-normal dispersions must be nonnegative");
  }
}

// Nearest multiple of 10^-decimals, as the double closest to that decimal.
double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

std::string padded_id(std::size_t k, std::size_t n) {
  std::string digits = std::to_string(k);
  const std::size_t width = std::to_string(n).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "L" + digits;
}

double sum_of_squares(std::span<const double> target, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  double mean = 0.0;
  for (auto i : rows) mean += target[i];
  mean /= static_cast<double>(rows.size());
  double ss = 0.0;
  for (auto i : rows) ss += (target[i] - mean) * (target[i] - mean);
  return ss;
}

}  // namespace

SynthPanel generate_panel(const SynthConfig& config) {
  check_config(config);
  const std::size_t n = config.n_units;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double noise_sd = std::sqrt(config.sigma2);

  SynthPanel out;
  out.records.reserve(n);
  out.truth.beta = config.beta;
  out.truth.sigma2 = config.sigma2;
  out.truth.latent_transformed.reserve(n);
  out.truth.latent_score.reserve(n);
  out.truth.noise.reserve(n);

  const auto lognormal = [&](double sd) { return std::exp(sd * gauss(rng)); };

  for (std::size_t k = 0; k < n; ++k) {
    // Draw order is fixed per unit so a given seed always yields the same panel.
    const double log_p = config.population_log_mean + config.population_log_sd * gauss(rng);
    const double population = std::max(config.population_min, std::round(std::exp(log_p)));
    const double density = round_to(
        std::exp(config.density_log_mean +
                 config.density_slope * (std::log(population) - config.population_log_mean) +
                 config.density_log_sd * gauss(rng)),
        3);
    const double at_town = unit(rng);
    const double spread = 1.0 - unit(rng);
    const double distance = at_town < config.distance_zero_share
                                ? 0.0
                                : std::max(0.01, round_to(config.distance_max * spread, 2));

    const double ln_p = std::log(population);
    const double eps = noise_sd * gauss(rng);
    const double latent = config.beta[0] + config.beta[1] * ln_p + config.beta[2] / ln_p +
                          config.beta[3] * distance / population + eps;
    const double score = inverse_logit(latent);

    const double exp16 = round_to(config.expenditure_per_capita * population * lognormal(config.input_log_sd), 0);
    const double exp17 = round_to(config.expenditure_per_capita * population * lognormal(config.input_log_sd), 0);
    double employees = round_to(config.employees_per_capita * population * lognormal(config.input_log_sd), 2);
    if (unit(rng) < config.zero_employees_share) employees = 0.0;
    const double col16 = round_to(config.collection_per_capita * population * lognormal(config.input_log_sd), 0);

    const double level = 0.5 * score * population;
    const double registrations = round_to(config.registrations_per_capita * level * lognormal(config.output_log_sd), 0);
    const double circulation = round_to(config.circulation_per_capita * level * lognormal(config.output_log_sd), 0);
    double events = round_to(config.events_per_capita * level * lognormal(config.output_log_sd), 0);
    if (unit(rng) < config.zero_events_share) events = 0.0;
    const double additions = round_to(config.additions_per_capita * level * lognormal(config.output_log_sd), 0);
    const double shrink = unit(rng);
    const double loss = 0.05 * unit(rng);
    const double col17 = shrink < config.shrinking_collection_share
                             ? round_to(col16 * (1.0 - loss), 0)
                             : col16 + additions;

    LibraryRecord r;
    r.id = padded_id(k + 1, n);
    r.name = "Library " + std::to_string(k + 1);
    r.set(Field::Expenditures2016, exp16);
    r.set(Field::Expenditures2017, exp17);
    r.set(Field::Employees2017, employees);
    r.set(Field::Collection2016, col16);
    r.set(Field::Collection2017, col17);
    r.set(Field::Registrations2017, registrations);
    r.set(Field::Circulation2017, circulation);
    r.set(Field::EventAttendance2017, events);
    r.set(Field::Population, population);
    r.set(Field::Density, density);
    r.set(Field::TownDistance, distance);
    out.records.push_back(std::move(r));

    out.truth.latent_transformed.push_back(latent);
    out.truth.latent_score.push_back(score);
    out.truth.noise.push_back(eps);
  }
  return out;
}

void write_ground_truth(std::ostream& out, const std::vector<LibraryRecord>& records,
                        const GroundTruth& truth) {
  if (records.size() != truth.latent_transformed.size()) {
    throw InputError("ground truth and records differ in length");
  }
  csv::write_row(out, {"id", "population", "distance", "latent_transformed", "latent_score", "noise"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv::write_row(out, {r.id, csv::format_double(r.get(Field::Population).value_or(NAN)),
                         csv::format_double(r.get(Field::TownDistance).value_or(NAN)),
                         csv::format_double(truth.latent_transformed[i]),
                         csv::format_double(truth.latent_score[i]),
                         csv::format_double(truth.noise[i])});
  }
}

void write_planted(std::ostream& out, const GroundTruth& truth) {
  static const char* terms[] = {"Intercept", "ln(p)", "1/ln(p)", "t/p"};
  csv::write_row(out, {"term", "value"});
  for (std::size_t k = 0; k < 4; ++k) csv::write_row(out, {terms[k], csv::format_double(truth.beta[k])});
  csv::write_row(out, {"sigma2", csv::format_double(truth.sigma2)});
}

double oracle_score_grid(const Panel& panel, std::size_t i, ReturnsToScale rts, double grid_step) {
  if (i >= panel.size()) throw InputError("DMU index out of range");
  if (!(grid_step > 0.0) || grid_step > 1.0) throw InputError("grid step must lie in (0, 1]");
  const std::size_t r = panel.input_count();
  const std::size_t s = panel.output_count();
  const bool vrs = rts == ReturnsToScale::Variable;
  const std::size_t nv = r + s + (vrs ? 1 : 0);
  const auto& x = panel.inputs();
  const auto& y = panel.outputs();

  LpProblem lp;
  lp.sense = Sense::Maximize;
  lp.objective.assign(nv, 0.0);
  lp.bounds.assign(nv, VariableBound::NonNegative);
  if (vrs) lp.bounds[nv - 1] = VariableBound::Free;

  const auto steps = static_cast<long>(std::floor(1.0 / grid_step + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double delta = 0.5 - static_cast<double>(k) * grid_step;
    lp.constraints.clear();
    LpConstraint own_out{std::vector<double>(nv, 0.0), Relation::GreaterEqual, 1.0};
    for (std::size_t q = 0; q < s; ++q) own_out.coefficients[r + q] = (1.0 - delta) * y(i, q);
    if (vrs) own_out.coefficients[nv - 1] = -1.0;
    lp.constraints.push_back(own_out);
    LpConstraint own_in{std::vector<double>(nv, 0.0), Relation::LessEqual, 1.0};
    for (std::size_t q = 0; q < r; ++q) own_in.coefficients[q] = (1.0 + delta) * x(i, q);
    lp.constraints.push_back(own_in);
    for (std::size_t j = 0; j < panel.size(); ++j) {
      if (j == i) continue;
      LpConstraint peer{std::vector<double>(nv, 0.0), Relation::LessEqual, 0.0};
      for (std::size_t q = 0; q < r; ++q) peer.coefficients[q] = -(1.0 - delta) * x(j, q);
      for (std::size_t q = 0; q < s; ++q) peer.coefficients[r + q] = (1.0 + delta) * y(j, q);
      if (vrs) peer.coefficients[nv - 1] = -1.0;
      lp.constraints.push_back(std::move(peer));
    }
    if (solve_lp(lp).optimal()) return 1.0 + 2.0 * delta;
  }
  return 0.0;
}

SplitChoice oracle_best_split(const FeatureTable& features, std::span<const double> target,
                              std::size_t min_bucket) {
  SplitChoice best;
  const std::size_t n = target.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (n == 0 || std::all_of(target.begin(), target.end(), [&](double v) { return v == target[0]; })) {
    return best;
  }
  const double total = sum_of_squares(target, all);
  const std::size_t bucket = std::max<std::size_t>(min_bucket, 1);

  for (std::size_t k = 0; k < features.feature_count(); ++k) {
    std::vector<double> values = features.columns[k];
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 1; v < values.size(); ++v) {
      double threshold = 0.5 * (values[v - 1] + values[v]);
      if (!(threshold > values[v - 1])) threshold = values[v];
      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (std::size_t i = 0; i < n; ++i) (features.columns[k][i] < threshold ? left : right).push_back(i);
      if (left.size() < bucket || right.size() < bucket) continue;
      const double improvement = total - sum_of_squares(target, left) - sum_of_squares(target, right);
      if (improvement > best.improvement) {
        best.found = true;
        best.feature = k;
        best.threshold = threshold;
        best.improvement = improvement;
      }
    }
  }
  return best;
}

}  // namespace chebdea
