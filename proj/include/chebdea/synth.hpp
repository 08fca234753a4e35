#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "chebdea/dea.hpp"
#include "chebdea/partition.hpp"
#include "chebdea/records.hpp"

namespace chebdea {

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_units = 4660;

  // ln p ~ N(population_log_mean, population_log_sd), rounded, floored at population_min.
  double population_log_mean = 6.06;
  double population_log_sd = 1.50;
  double population_min = 34.0;

  // ln d = density_log_mean + density_slope * (ln p - population_log_mean) + N(0, density_log_sd).
  double density_log_mean = -0.30;
  double density_slope = 0.45;
  double density_log_sd = 0.60;

  // Distance: exactly zero with probability distance_zero_share, else uniform on (0, distance_max].
  double distance_max = 58.12;
  double distance_zero_share = 0.03;

  // Per-capita input magnitudes at unit scale and their log-normal dispersion.
  double expenditure_per_capita = 30.0;
  double employees_per_capita = 0.0004;
  double collection_per_capita = 8.0;
  double input_log_sd = 0.25;

  // Per-capita output magnitudes on the frontier (latent score 2).
  double registrations_per_capita = 0.25;
  double circulation_per_capita = 12.0;
  double events_per_capita = 0.6;
  double additions_per_capita = 0.4;
  double output_log_sd = 0.10;

  // Shares of structurally zero entries.
  double zero_employees_share = 0.05;
  double zero_events_share = 0.10;
  double shrinking_collection_share = 0.08;

  // Planted environmental effect on the transformed latent efficiency.
  std::array<double, 4> beta = {-24.0894, 1.9496, 54.3415, -2.7975};
  double sigma2 = 1.0;
};

struct GroundTruth {
  std::array<double, 4> beta{};
  double sigma2 = 0.0;
  std::vector<double> latent_transformed;  // z_i' beta + noise_i
  std::vector<double> latent_score;        // inverse logit of latent_transformed, in (0, 2)
  std::vector<double> noise;
};

struct SynthPanel {
  std::vector<LibraryRecord> records;
  GroundTruth truth;
};

// Throws InputError if n_units < 2, sigma2 < 0, population_min < 2, or a share is outside [0, 1].
SynthPanel generate_panel(const SynthConfig& config);

// Sidecar CSV: id, population, distance, latent_transformed, latent_score, noise.
void write_ground_truth(std::ostream& out, const std::vector<LibraryRecord>& records,
                        const GroundTruth& truth);
// Planted coefficients CSV: term, beta; last row is sigma2.
void write_planted(std::ostream& out, const GroundTruth& truth);

// Reference score for the nonlinear Chebyshev model: scans delta downward from 0.5 in
// grid_step increments and returns 1 + 2 * (first feasible delta). Builds its own
// fixed-delta constraint system. Returns 0 when nothing on the grid is feasible.
double oracle_score_grid(const Panel& panel, std::size_t i, ReturnsToScale rts, double grid_step);

// Exhaustive single-split reference: every (feature, midpoint threshold) pair, both sides
// holding at least min_bucket units, improvement from two-pass sums of squares. Same
// tie-break as best_split.
SplitChoice oracle_best_split(const FeatureTable& features, std::span<const double> target,
                              std::size_t min_bucket = 1);

}  // namespace chebdea
