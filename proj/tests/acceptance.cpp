// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chebdea/dea.hpp"
#include "chebdea/partition.hpp"
#include "chebdea/pipeline.hpp"
#include "chebdea/second_stage.hpp"
#include "chebdea/synth.hpp"
#include "test_support.hpp"

namespace {

using namespace chebdea;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome hand_instance() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto panel = testing::hand_panel();
  const double ra = chebyshev_score_linear(panel, 0, ReturnsToScale::Variable).score;
  const double rb = chebyshev_score_linear(panel, 1, ReturnsToScale::Variable).score;
  const double theta_b = classical_efficiency(panel, 1, ReturnsToScale::Variable);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = std::abs(ra - 2.0) <= 1e-6 && std::abs(rb - 0.666667) <= 1e-6 &&
                  std::abs(theta_b - 0.5) <= 1e-6 && secs < 1.0;
  return {ok, fmt("r_A=%.9f r_B=%.9f theta_B=%.9f in %.4f s", ra, rb, theta_b, secs)};
}

Outcome bounds() {
  std::mt19937_64 rng(20001);
  std::size_t scored = 0;
  std::size_t out_of_range = 0;
  std::size_t failures = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int p = 0; p < 10000; ++p) {
    const auto panel = testing::random_panel(rng, draw(rng, 1, 12), draw(rng, 1, 4), draw(rng, 1, 4), 0.10);
    for (auto rts : {ReturnsToScale::Variable, ReturnsToScale::Constant}) {
      try {
        for (const auto& s : score_all(panel, rts, ScoringMethod::Linear)) {
          ++scored;
          out_of_range += !(s.score >= 0.0 && s.score <= 2.0);
        }
      } catch (const std::exception&) {
        ++failures;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {out_of_range == 0 && failures == 0 && secs < 120.0,
          fmt("%zu scores (VRS+CRS), %zu outside [0,2], %zu solver failures, %.1f s", scored, out_of_range,
              failures, secs)};
}

Outcome exact_vs_oracle() {
  std::mt19937_64 rng(30003);
  std::vector<Panel> panels;
  for (int p = 0; p < 200; ++p) {
    panels.push_back(testing::random_panel(rng, draw(rng, 1, 8), draw(rng, 1, 3), draw(rng, 1, 3)));
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> worst(panels.size(), 0.0);
  std::vector<int> failed(panels.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < panels.size(); ++p) {
    try {
      for (std::size_t i = 0; i < panels[p].size(); ++i) {
        const double exact = chebyshev_score_exact(panels[p], i, ReturnsToScale::Variable).score;
        const double grid = oracle_score_grid(panels[p], i, ReturnsToScale::Variable, 1e-4);
        worst[p] = std::max(worst[p], std::abs(exact - grid));
      }
    } catch (const std::exception&) {
      failed[p] = 1;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double max_gap = *std::max_element(worst.begin(), worst.end());
  const int failures = std::count(failed.begin(), failed.end(), 1);
  return {max_gap <= 2e-4 && failures == 0 && secs < 300.0,
          fmt("max |exact - grid| = %.3g over 200 VRS panels, %d failures, %.1f s", max_gap, failures, secs)};
}

Outcome ranking() {
  std::mt19937_64 rng(40004);
  std::size_t pairs = 0;
  std::size_t violations = 0;
  for (int p = 0; p < 100; ++p) {
    const auto panel = testing::random_panel(rng, 30, draw(rng, 1, 3), draw(rng, 1, 3));
    for (auto rts : {ReturnsToScale::Variable, ReturnsToScale::Constant}) {
      std::vector<double> r;
      std::vector<double> theta;
      for (std::size_t i = 0; i < panel.size(); ++i) {
        const double s = chebyshev_score_linear(panel, i, rts).score;
        if (s >= 1.0) continue;
        r.push_back(s);
        theta.push_back(classical_efficiency(panel, i, rts));
      }
      for (std::size_t a = 0; a < r.size(); ++a) {
        for (std::size_t b = a + 1; b < r.size(); ++b) {
          ++pairs;
          const bool theta_lt = theta[a] < theta[b] - 1e-7;
          const bool theta_gt = theta[a] > theta[b] + 1e-7;
          const bool r_lt = r[a] < r[b] - 1e-7;
          const bool r_gt = r[a] > r[b] + 1e-7;
          violations += (theta_lt && !r_lt) || (theta_gt && !r_gt) || (!theta_lt && !theta_gt && (r_lt || r_gt));
        }
      }
    }
  }
  return {violations == 0, fmt("%zu inefficient pairs (VRS vs BCC, CRS vs CCR), %zu order violations", pairs,
                               violations)};
}

Outcome units_invariance() {
  std::mt19937_64 rng(50005);
  const double factors[] = {1e-3, 1.0, 1e3};
  double worst = 0.0;
  for (int p = 0; p < 50; ++p) {
    const auto panel = testing::random_panel(rng, draw(rng, 2, 12), draw(rng, 1, 4), draw(rng, 1, 4), 0.10);
    RowMatrix x = panel.inputs();
    RowMatrix y = panel.outputs();
    for (Eigen::Index k = 0; k < x.cols(); ++k) x.col(k) *= factors[draw(rng, 0, 2)];
    for (Eigen::Index k = 0; k < y.cols(); ++k) y.col(k) *= factors[draw(rng, 0, 2)];
    const Panel scaled(panel.ids(), x, y);
    for (auto rts : {ReturnsToScale::Variable, ReturnsToScale::Constant}) {
      const auto a = score_all(panel, rts, ScoringMethod::Linear);
      const auto b = score_all(scaled, rts, ScoringMethod::Linear);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i].score - b[i].score));
    }
  }
  return {worst <= 1e-9, fmt("max score change %.3g over 50 panels, both RTS", worst)};
}

Outcome separation() {
  std::mt19937_64 rng(60006);
  double worst_drop = 0.0;
  std::size_t single_mismatch = 0;
  for (int p = 0; p < 50; ++p) {
    const auto panel = testing::random_panel(rng, draw(rng, 3, 20), draw(rng, 1, 3), draw(rng, 1, 3), 0.10);
    CategoryAssignment parts;
    CategoryAssignment single;
    for (std::size_t i = 0; i < panel.size(); ++i) {
      parts.labels.push_back("C" + std::to_string(draw(rng, 1, 3)));
      single.labels.push_back("all");
    }
    for (auto rts : {ReturnsToScale::Variable, ReturnsToScale::Constant}) {
      const auto pre = score_all(panel, rts, ScoringMethod::Linear);
      const auto sep = separated_scores(panel, parts, rts, ScoringMethod::Linear);
      const auto one = separated_scores(panel, single, rts, ScoringMethod::Linear);
      for (std::size_t i = 0; i < pre.size(); ++i) {
        worst_drop = std::max(worst_drop, pre[i].score - sep[i].score);
        single_mismatch += std::memcmp(&pre[i].score, &one[i].score, sizeof(double)) != 0;
      }
    }
  }
  return {worst_drop <= 1e-9 && single_mismatch == 0,
          fmt("largest drop preliminary -> separated %.3g, %zu single-category mismatches", worst_drop,
              single_mismatch)};
}

Outcome recovery() {
  constexpr int kSeeds = 500;
  int covered[4] = {0, 0, 0, 0};
  int joint = 0;
  SynthConfig config;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    config.seed = static_cast<std::uint64_t>(seed);
    const auto s = generate_panel(config);
    std::vector<double> p;
    std::vector<double> t;
    for (const auto& r : s.records) {
      p.push_back(*r.get(Field::Population));
      t.push_back(*r.get(Field::TownDistance));
    }
    const auto fit = ols_fit(build_design_matrix(p, t), s.truth.latent_transformed);
    bool all = true;
    for (int k = 0; k < 4; ++k) {
      const bool in = std::abs(fit.beta(k) - config.beta[static_cast<std::size_t>(k)]) <= 3.0 * fit.std_errors(k);
      covered[k] += in;
      all = all && in;
    }
    joint += all;
  }
  const int least = *std::min_element(covered, covered + 4);
  return {least >= 0.99 * kSeeds,
          fmt("within 3 SE per coefficient: %d %d %d %d of %d (all four jointly: %d)", covered[0], covered[1],
              covered[2], covered[3], kSeeds, joint)};
}

Outcome tree_mechanism() {
  SynthConfig config;
  config.seed = 8;
  const auto s = generate_panel(config);
  FeatureTable f;
  f.names = {"population", "distance"};
  f.columns.resize(2);
  for (const auto& r : s.records) {
    f.columns[0].push_back(*r.get(Field::Population));
    f.columns[1].push_back(*r.get(Field::TownDistance));
  }

  TreeOptions options;  // min_bucket 138, depth 7, 11 leaves
  const auto fit = fit_regression_tree(f, s.truth.latent_score, options);
  std::map<std::string, std::size_t> routed;
  for (std::size_t i = 0; i < f.unit_count(); ++i) ++routed[assign_category(fit.tree, f.row(i))];
  std::size_t smallest = f.unit_count();
  for (const auto& [label, count] : routed) smallest = std::min(smallest, count);

  // Unconstrained growth must also respect the bucket floor.
  TreeOptions wide = options;
  wide.n_leaves = 1000;
  wide.max_depth = 30;
  const auto grown = fit_regression_tree(f, s.truth.latent_score, wide);
  std::size_t smallest_grown = f.unit_count();
  for (const auto* leaf : grown.tree.leaves()) smallest_grown = std::min(smallest_grown, leaf->count);

  std::vector<double> step(f.unit_count());
  for (std::size_t i = 0; i < step.size(); ++i) step[i] = f.columns[0][i] < 1000.0 ? 0.0 : 1.0;
  const auto step_fit = fit_regression_tree(f, step, options);
  const auto oracle = oracle_best_split(f, step, options.min_bucket);
  const auto& root = step_fit.tree.root();
  const bool root_match = !root.leaf && oracle.found && root.feature == oracle.feature &&
                          root.threshold == oracle.threshold &&
                          std::abs(root.improvement - oracle.improvement) <= 1e-9 * oracle.improvement;

  const bool ok = smallest >= 138 && smallest_grown >= 138 && root_match && fit.tree.leaf_count() == 11 &&
                  routed.size() == 11 && fit.tree.depth() <= 7;
  return {ok, fmt("11-leaf tree: %zu leaves, depth %zu, smallest %zu; full growth %zu leaves, smallest %zu; "
                  "step root %s at %g (oracle %s at %g)",
                  fit.tree.leaf_count(), fit.tree.depth(), smallest, grown.tree.leaf_count(), smallest_grown,
                  f.names[root.feature].c_str(), root.threshold, f.names[oracle.feature].c_str(),
                  oracle.threshold)};
}

Outcome expert_sweep() {
  const double ps[] = {1, 199, 200, 499, 500, 999, 1000, 1999, 2000, 1e6};
  const double ts[] = {0, 0.01, 14.99, 15, 60};
  std::size_t pairs = 0;
  std::size_t bad = 0;
  for (double p : ps) {
    for (double t : ts) {
      ++pairs;
      std::size_t matches = 0;
      for (const auto& rule : expert_rules()) matches += rule.population.contains(p) && rule.distance.contains(t);
      bad += matches != 1;
      try {
        assign_expert_category(p, t);
      } catch (const std::exception&) {
        ++bad;
      }
    }
  }
  const bool examples = assign_expert_category(150, 10) == "E01" && assign_expert_category(2500, 20) == "E10" &&
                        assign_expert_category(150, 0) == "E11" && assign_expert_category(1e6, 0) == "E11" &&
                        assign_expert_category(200, 14.99) == "E03" && assign_expert_category(199, 15) == "E02";
  return {bad == 0 && examples, fmt("%zu grid pairs, %zu without exactly one rule, examples %s", pairs, bad,
                                    examples ? "ok" : "wrong")};
}

// Shared by the performance and density criteria.
struct PipelineRun {
  PipelineReport report;
  double seconds = 0.0;
};

PipelineRun timed_pipeline() {
  SynthConfig config;
  config.seed = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = generate_panel(config);
  PipelineConfig pc;
  pc.mode = CategorizationMode::Both;
  pc.method = ScoringMethod::Linear;
  PipelineRun run{run_pipeline(s.records, pc), 0.0};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

Outcome performance(const PipelineRun& first, const PipelineRun& second) {
  const auto dir = fs::temp_directory_path() / "chebdea_acceptance";
  fs::remove_all(dir);
  write_report(dir / "a", first.report);
  write_report(dir / "b", second.report);
  std::size_t files = 0;
  std::size_t differing = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    ++files;
    differing += slurp(entry.path()) != slurp(dir / "b" / entry.path().filename());
  }
  fs::remove_all(dir);
  const double worst = std::max(first.seconds, second.seconds);
  return {worst < 300.0 && differing == 0 && files > 0,
          fmt("4660 units, mode both: %.1f s and %.1f s, %zu report files, %zu differ", first.seconds,
              second.seconds, files, differing)};
}

Outcome densities(const PipelineRun& run) {
  double lo = 2.0;
  double hi = 0.0;
  std::size_t curves = 0;
  for (const auto& set : run.report.score_sets) {
    const double area = trapezoid(set.density.grid, set.density.density);
    lo = std::min(lo, area);
    hi = std::max(hi, area);
    ++curves;
  }
  return {curves > 0 && lo >= 0.999 && hi <= 1.001,
          fmt("%zu curves, integrals in [%.6f, %.6f]", curves, lo, hi)};
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s  %2d %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "hand-instance", hand_instance);
  report(2, "bounds", bounds);
  report(3, "exact-vs-grid", exact_vs_oracle);
  report(4, "ranking-order", ranking);
  report(5, "units-invariance", units_invariance);
  report(6, "separation", separation);
  report(7, "second-stage-recovery", recovery);
  report(8, "tree-mechanism", tree_mechanism);
  report(9, "expert-rules", expert_sweep);

  std::optional<PipelineRun> first;
  report(10, "pipeline-performance", [&] {
    first.emplace(timed_pipeline());
    return performance(*first, timed_pipeline());
  });
  report(11, "density-integrals", [&] {
    if (!first) return Outcome{false, "no pipeline run"};
    return densities(*first);
  });

  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
